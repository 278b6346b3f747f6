"""Constructive stratified spaces and their stratum tables.

Spaces are built from five constructors::

    leaf(dim=d, H=[...])      a manifold-like piece with given hypercohomology
    prod(k=k, X)              R^k x X
    cone(X)                   open cone on a compact X
    susp(X)                   suspension, both cone points forming one stratum
    join(k=k, X)              S^k * X with S^k trivially stratified

Every cone, suspension and join node creates one singular stratum whose link
is the node's inner expression.  Stratum ids are the ``/``-joined names of the
constructors on the path to the creating node; ``prod`` nodes are skipped
since they do not create strata.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from tsdeligne.errors import UnknownStratumError
from tsdeligne.fgmod import GradedModule
from tsdeligne.perversity import CoefficientData


@dataclass(frozen=True)
class Leaf:
    dim: int
    cohom: GradedModule = field(default_factory=GradedModule)
    coeffs: CoefficientData = field(default_factory=CoefficientData)
    name: str = ""

    def __post_init__(self) -> None:
        if self.dim < 0:
            raise ValueError("leaf dimension must be non-negative")


@dataclass(frozen=True)
class ProdR:
    k: int
    inner: "SpaceExpr"

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("prod needs k >= 1")


@dataclass(frozen=True)
class Cone:
    inner: "SpaceExpr"


@dataclass(frozen=True)
class Susp:
    inner: "SpaceExpr"


@dataclass(frozen=True)
class SphereJoin:
    k: int
    inner: "SpaceExpr"

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("join needs k >= 1; use susp for the two-point join")


SpaceExpr = Union[Leaf, ProdR, Cone, Susp, SphereJoin]

KIND_NAMES = {Leaf: "leaf", ProdR: "prod", Cone: "cone", Susp: "susp", SphereJoin: "join"}


def kind_name(node: SpaceExpr) -> str:
    return KIND_NAMES[type(node)]


def dim(space: SpaceExpr) -> int:
    if isinstance(space, Leaf):
        return space.dim
    if isinstance(space, ProdR):
        return space.k + dim(space.inner)
    if isinstance(space, (Cone, Susp)):
        return 1 + dim(space.inner)
    if isinstance(space, SphereJoin):
        return space.k + 1 + dim(space.inner)
    raise TypeError(f"not a space expression: {space!r}")


def is_compact(space: SpaceExpr) -> bool:
    if isinstance(space, Leaf):
        return True
    if isinstance(space, (Susp, SphereJoin)):
        return is_compact(space.inner)
    return False


def leaf_of(space: SpaceExpr) -> Leaf:
    while not isinstance(space, Leaf):
        space = space.inner
    return space


def depth(space: SpaceExpr) -> int:
    """Number of constructors above the leaf."""
    n = 0
    while not isinstance(space, Leaf):
        space, n = space.inner, n + 1
    return n


@dataclass(frozen=True)
class Stratum:
    id: str
    kind: str  # "regular" or "singular"
    dim: int
    codim: int
    link: Optional[SpaceExpr] = None

    @property
    def is_regular(self) -> bool:
        return self.kind == "regular"

    @property
    def is_singular(self) -> bool:
        return self.kind == "singular"


def _strata(space: SpaceExpr, prefix: str) -> list[Stratum]:
    if isinstance(space, Leaf):
        sid = prefix + "leaf"
        return [Stratum(sid, "regular", space.dim, 0, None)]
    if isinstance(space, ProdR):
        return [
            Stratum(s.id, s.kind, s.dim + space.k, s.codim, s.link)
            for s in _strata(space.inner, prefix)
        ]
    name = kind_name(space)
    here = prefix + name
    inner = _strata(space.inner, here + "/")
    if isinstance(space, SphereJoin):
        own_dim, shift = space.k, space.k + 1
    else:
        own_dim, shift = 0, 1
    own = Stratum(here, "singular", own_dim, dim(space.inner) + 1, space.inner)
    return [own] + [Stratum(s.id, s.kind, s.dim + shift, s.codim, s.link) for s in inner]


def strata(space: SpaceExpr) -> list[Stratum]:
    """All strata, outermost singular stratum first and the regular stratum last."""
    return _strata(space, "")


def singular_strata(space: SpaceExpr) -> list[Stratum]:
    return [s for s in strata(space) if s.is_singular]


def regular_strata(space: SpaceExpr) -> list[Stratum]:
    return [s for s in strata(space) if s.is_regular]


def find_stratum(space: SpaceExpr, stratum_id: str) -> Stratum:
    for s in strata(space):
        if s.id == stratum_id:
            return s
    known = ", ".join(s.id for s in strata(space))
    raise UnknownStratumError(f"no stratum {stratum_id!r}; known strata: {known}")


def subexpression(space: SpaceExpr, stratum_id: str) -> SpaceExpr:
    """The node that creates ``stratum_id`` (the leaf for the regular stratum)."""
    parts = stratum_id.split("/")
    node = space
    for i, part in enumerate(parts):
        while isinstance(node, ProdR):
            node = node.inner
        if kind_name(node) != part:
            raise UnknownStratumError(f"no stratum {stratum_id!r}")
        if i < len(parts) - 1:
            if isinstance(node, Leaf):
                raise UnknownStratumError(f"no stratum {stratum_id!r}")
            node = node.inner
    return node


@dataclass(frozen=True)
class Diagnostic:
    path: str
    severity: str  # "error" or "warning"
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.path or '<root>'}: {self.message}"


def validate(space: SpaceExpr) -> list[Diagnostic]:
    """Structural diagnostics; the space is usable when no entry is an error.

    Codimension-one strata are legal and reported as warnings.
    """
    out: list[Diagnostic] = []

    def walk(node: SpaceExpr, path: str) -> None:
        name = kind_name(node)
        here = f"{path}/{name}" if path else name
        if isinstance(node, Leaf):
            degs = node.cohom.degrees()
            bad = [d for d in degs if d < 0 or d > node.dim]
            if bad:
                out.append(Diagnostic(here, "error", f"leaf cohomology in degrees {bad} outside [0, {node.dim}]"))
            return
        if isinstance(node, (Cone, Susp, SphereJoin)) and not is_compact(node.inner):
            what = {"cone": "cone on", "susp": "suspension of", "join": "join with"}[name]
            out.append(Diagnostic(here, "error", f"{what} non-compact space"))
        walk(node.inner, here)

    walk(space, "")
    for s in strata(space):
        if s.is_singular and s.codim == 1:
            out.append(Diagnostic(s.id, "warning", "codimension-one stratum"))
    return out


def errors(space: SpaceExpr) -> list[Diagnostic]:
    return [d for d in validate(space) if d.severity == "error"]


def has_codim_one(space: SpaceExpr) -> bool:
    return any(s.is_singular and s.codim == 1 for s in strata(space))


def to_text(space: SpaceExpr, unicode: bool = False) -> str:
    """Canonical text form; :func:`tsdeligne.syntax.parse_space` inverts it."""
    if isinstance(space, Leaf):
        parts = []
        if space.name:
            parts.append(f"name={space.name}")
        parts.append(f"dim={space.dim}")
        if space.cohom.min_degree() is not None and space.cohom.min_degree() < 0:
            raise ValueError("cannot print a leaf with negative-degree cohomology")
        parts.append("H=[" + ", ".join(m.to_text(unicode) for m in space.cohom.to_list()) + "]")
        if space.coeffs != CoefficientData():
            parts.append(f"E=[{space.coeffs.h0.to_text(unicode)}, {space.coeffs.h1.to_text(unicode)}]")
        return "leaf(" + ", ".join(parts) + ")"
    if isinstance(space, ProdR):
        return f"prod(k={space.k}, {to_text(space.inner, unicode)})"
    if isinstance(space, SphereJoin):
        return f"join(k={space.k}, {to_text(space.inner, unicode)})"
    return f"{kind_name(space)}({to_text(space.inner, unicode)})"


def susp_power(space: SpaceExpr, times: int) -> SpaceExpr:
    for _ in range(times):
        space = Susp(space)
    return space
