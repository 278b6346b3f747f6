"""Text syntax for groups, prime sets, perversities and space expressions.

Examples of accepted input::

    Z^2 + Z/4 + Z/9          0          Z/6
    {}    {2,3}    {2,f}    all    all \\ {2,5}    all+f \\ {3}
    perversity { 2 = (0, {}); 3 = (0, {2}); 4 = (1, {}); }
    perversity { "susp" = (0, {2}); "susp/susp" = (1, all); }
    join(k=1, susp(leaf(dim=2, H=[Z, 0, Z])))

The unicode forms ``ℤ`` and ``⊕`` are accepted as synonyms for ``Z`` and ``+``.
Errors are raised as :class:`ParseError` with a 1-based line and column.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from tsdeligne.errors import ParseError
from tsdeligne.fgmod import F, FgModule, GradedModule, PrimeSet
from tsdeligne.perversity import CodimPerversity, CoefficientData, PervValue, StratumPerversity
from tsdeligne.space import Cone, Leaf, ProdR, SpaceExpr, SphereJoin, Susp


@dataclass(frozen=True)
class Token:
    kind: str  # INT, IDENT, STRING, PUNCT, EOF
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<INT>\d+)
  | (?P<IDENT>[A-Za-z_][A-Za-z0-9_]*|ℤ)
  | (?P<STRING>"[^"\n]*")
  | (?P<PUNCT>[()\[\]{},;=+/^\\\-:>]|⊕)
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            tok = m.group()
            if tok == "ℤ":
                tok = "Z"
            elif tok == "⊕":
                tok = "+"
            tokens.append(Token(kind, tok, line, col))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


class Parser:
    """Recursive-descent parser over a token list."""

    def __init__(self, text: str, line_offset: int = 0):
        self.tokens = tokenize(text)
        if line_offset:
            self.tokens = [Token(t.kind, t.text, t.line + line_offset, t.col) for t in self.tokens]
        self.i = 0

    # -- token helpers
    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.i += 1
        return tok

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek()
        found = tok.text or "end of input"
        return ParseError(f"{message}, found {found!r}", tok.line, tok.col)

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind in ("PUNCT", "IDENT") and tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        return self.next()

    def expect_kind(self, kind: str, what: str) -> Token:
        if self.peek().kind != kind:
            raise self.error(f"expected {what}")
        return self.next()

    def expect_eof(self) -> None:
        if self.peek().kind != "EOF":
            raise self.error("expected end of input")

    def integer(self) -> int:
        neg = self.accept("-")
        tok = self.expect_kind("INT", "an integer")
        return -int(tok.text) if neg else int(tok.text)

    # -- groups
    def group(self) -> FgModule:
        tok = self.peek()
        if tok.kind == "INT" and tok.text == "0":
            self.next()
            return FgModule()
        acc = self.group_term()
        while self.accept("+"):
            acc = acc + self.group_term()
        return acc

    def group_term(self) -> FgModule:
        tok = self.peek()
        if tok.kind == "INT" and tok.text == "0":
            self.next()
            return FgModule()
        if not (tok.kind == "IDENT" and tok.text == "Z"):
            raise self.error("expected a group such as Z, Z^2, Z/4 or 0")
        self.next()
        if self.accept("^"):
            return FgModule(self.integer_nonneg("free rank"))
        if self.accept("/"):
            n_tok = self.peek()
            n = self.integer_nonneg("cyclic order")
            if n < 1:
                raise self.error("cyclic order must be positive", n_tok)
            return FgModule.cyclic(n)
        return FgModule(1)

    def integer_nonneg(self, what: str) -> int:
        tok = self.expect_kind("INT", what)
        return int(tok.text)

    def group_list(self) -> list[FgModule]:
        self.expect("[")
        items: list[FgModule] = []
        if not self.at("]"):
            items.append(self.group())
            while self.accept(","):
                items.append(self.group())
        self.expect("]")
        return items

    # -- prime sets
    def prime(self) -> int:
        tok = self.peek()
        n = self.integer_nonneg("a prime")
        try:
            PrimeSet.of(n)
        except ValueError:
            raise self.error(f"{n} is not a prime", tok) from None
        return n

    def braced_primes(self, allow_f: bool) -> tuple[list[int], bool]:
        self.expect("{")
        primes: list[int] = []
        has_f = False
        if not self.at("}"):
            while True:
                if self.at(F):
                    if not allow_f:
                        raise self.error("f is not allowed here")
                    self.next()
                    has_f = True
                else:
                    primes.append(self.prime())
                if not self.accept(","):
                    break
        self.expect("}")
        return primes, has_f

    def prime_set(self) -> PrimeSet:
        if self.at("{"):
            primes, has_f = self.braced_primes(True)
            return PrimeSet(tuple(primes), False, has_f)
        if self.accept("all"):
            with_f = False
            if self.accept("+"):
                self.expect(F)
                with_f = True
            excluded: list[int] = []
            if self.accept("\\"):
                excluded, _ = self.braced_primes(False)
            return PrimeSet(tuple(excluded), True, with_f)
        raise self.error("expected a prime set such as {}, {2,3} or all \\ {5}")

    # -- perversities
    def perv_value(self) -> PervValue:
        self.expect("(")
        p1 = self.integer()
        self.expect(",")
        tok = self.peek()
        p2 = self.prime_set()
        if p2.includes_f:
            raise self.error("perversity prime sets cannot contain f", tok)
        self.expect(")")
        return PervValue(p1, p2)

    def perversity(self) -> CodimPerversity | StratumPerversity:
        self.expect("perversity")
        self.expect("{")
        codim: dict[int, PervValue] = {}
        named: dict[str, PervValue] = {}
        while not self.at("}"):
            key_tok = self.peek()
            if key_tok.kind == "INT":
                key: int | str = int(self.next().text)
            elif key_tok.kind == "STRING":
                key = self.next().text[1:-1]
            else:
                raise self.error("expected a codimension or a quoted stratum id")
            self.expect("=")
            val = self.perv_value()
            target = codim if isinstance(key, int) else named
            if key in target:
                raise self.error(f"duplicate key {key!r}", key_tok)
            target[key] = val  # type: ignore[index]
            if not self.accept(";"):
                break
        self.expect("}")
        if codim and named:
            raise self.error("cannot mix codimension and stratum keys")
        if named:
            return StratumPerversity.from_dict(named)
        if not codim:
            raise self.error("empty perversity")
        keys = sorted(codim)
        if keys[0] < 1:
            raise ParseError("codimensions start at 1", self.peek().line, self.peek().col)
        missing = sorted(set(range(keys[0], keys[-1] + 1)) - set(keys))
        if missing:
            raise self.error(f"perversity table is missing codimensions {missing}")
        return CodimPerversity.from_dict(codim)

    # -- spaces
    def keyword_int(self, name: str) -> int:
        self.expect(name)
        self.expect("=")
        return self.integer()

    def space(self) -> SpaceExpr:
        tok = self.peek()
        if tok.kind != "IDENT":
            raise self.error("expected a space constructor (leaf, prod, cone, susp, join)")
        name = tok.text
        self.next()
        self.expect("(")
        try:
            if name == "leaf":
                node = self.leaf_args()
            elif name in ("prod", "join"):
                k = self.keyword_int("k")
                self.expect(",")
                inner = self.space()
                node = ProdR(k, inner) if name == "prod" else SphereJoin(k, inner)
            elif name in ("cone", "susp"):
                inner = self.space()
                node = Cone(inner) if name == "cone" else Susp(inner)
            else:
                raise self.error("unknown space constructor", tok)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), tok.line, tok.col) from None
        self.expect(")")
        return node

    def leaf_args(self) -> Leaf:
        name = ""
        dim = None
        cohom = GradedModule()
        coeffs = CoefficientData()
        seen: set[str] = set()
        while not self.at(")"):
            key_tok = self.expect_kind("IDENT", "a leaf argument (name, dim, H, E)")
            key = key_tok.text
            if key in seen:
                raise self.error(f"duplicate leaf argument {key!r}", key_tok)
            seen.add(key)
            self.expect("=")
            if key == "name":
                name = self.expect_kind("IDENT", "a name").text
            elif key == "dim":
                dim = self.integer()
            elif key == "H":
                cohom = GradedModule.from_list(self.group_list())
            elif key == "E":
                lst_tok = self.peek()
                groups = self.group_list()
                if len(groups) != 2:
                    raise self.error("E takes exactly two groups [h0, h1]", lst_tok)
                try:
                    coeffs = CoefficientData(groups[0], groups[1])
                except ValueError as exc:
                    raise ParseError(str(exc), lst_tok.line, lst_tok.col) from None
            else:
                raise self.error("unknown leaf argument", key_tok)
            if not self.accept(","):
                break
        if dim is None:
            raise self.error("leaf needs dim=")
        return Leaf(dim, cohom, coeffs, name)


def _whole(text: str, method: str):
    p = Parser(text)
    out = getattr(p, method)()
    p.expect_eof()
    return out


def parse_group(text: str) -> FgModule:
    return _whole(text, "group")


def parse_group_list(text: str) -> list[FgModule]:
    return _whole(text, "group_list")


def parse_graded(text: str) -> GradedModule:
    return GradedModule.from_list(parse_group_list(text))


def parse_prime_set(text: str) -> PrimeSet:
    return _whole(text, "prime_set")


def parse_perv_value(text: str) -> PervValue:
    return _whole(text, "perv_value")


def parse_perversity(text: str) -> CodimPerversity | StratumPerversity:
    return _whole(text, "perversity")


def parse_space(text: str) -> SpaceExpr:
    return _whole(text, "space")


def parse_coeffs(text: str) -> CoefficientData:
    p = Parser(text)
    tok = p.peek()
    groups = p.group_list()
    p.expect_eof()
    if len(groups) != 2:
        raise ParseError("coefficients take exactly two groups [h0, h1]", tok.line, tok.col)
    try:
        return CoefficientData(groups[0], groups[1])
    except ValueError as exc:
        raise ParseError(str(exc), tok.line, tok.col) from None


def prime_or_f(text: str) -> int | str:
    """Parse a single prime or the formal element f."""
    t = text.strip()
    if t == F:
        return F
    try:
        n = int(t)
        PrimeSet.of(n)
    except ValueError:
        raise ParseError(f"expected a prime or f, found {t!r}", 1, 1) from None
    return n
