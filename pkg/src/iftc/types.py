"""Semantic types.

Types are immutable and hashable. Unions hold a frozenset of members, so
equality ignores member order; :func:`render` fixes a display order.
Construct unions through :meth:`iftc.typealg.Algebra.normalize` (or
:func:`union`) rather than directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields


class Type:
    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, repr=False)
class Prim(Type):
    name: str

    def __repr__(self) -> str:
        return self.name


TOP = Prim("Top")
BOTTOM = Prim("Bottom")
NUMBER = Prim("Number")
STRING = Prim("String")
BOOLEAN = Prim("Boolean")
TRUE = Prim("True")
FALSE = Prim("False")
NONE = Prim("None")

BASE_TYPES = (NUMBER, STRING, BOOLEAN, NONE)
PRIM_ORDER = {p: i for i, p in enumerate((TOP, BOTTOM, NUMBER, STRING, BOOLEAN, TRUE, FALSE, NONE))}


@dataclass(frozen=True, repr=False)
class NumLitT(Type):
    value: int | float

    def __repr__(self) -> str:
        return f"NumLitT({_num(self.value)})"


@dataclass(frozen=True, repr=False)
class TupleT(Type):
    elems: tuple

    def __repr__(self) -> str:
        return f"TupleT{self.elems!r}"


@dataclass(frozen=True, repr=False)
class ListT(Type):
    elem: Type

    def __repr__(self) -> str:
        return f"ListT({self.elem!r})"


@dataclass(frozen=True, repr=False)
class MapT(Type):
    """String-keyed object; a given key may be absent."""

    value: Type

    def __repr__(self) -> str:
        return f"MapT({self.value!r})"


@dataclass(frozen=True, repr=False)
class RecordT(Type):
    name: str

    def __repr__(self) -> str:
        return f"RecordT({self.name})"


SYMMETRIC = "symmetric"
ASYMMETRIC = "asymmetric-positive"


@dataclass(frozen=True)
class LatentPred:
    kind: str
    index: int
    target: Type


@dataclass(frozen=True, repr=False)
class FuncT(Type):
    params: tuple
    ret: Type
    latent: LatentPred | None = None
    names: tuple = field(default=(), compare=False)

    def __repr__(self) -> str:
        return f"FuncT({render(self)})"


@dataclass(frozen=True, repr=False)
class UnionT(Type):
    members: frozenset

    def __repr__(self) -> str:
        return f"UnionT({render(self)})"


@dataclass(frozen=True, repr=False)
class TypeVar(Type):
    name: str

    def __repr__(self) -> str:
        return f"TypeVar({self.name})"


@dataclass(frozen=True, repr=False)
class AliasRef(Type):
    name: str

    def __repr__(self) -> str:
        return f"AliasRef({self.name})"


def _cached_hash(self) -> int:
    # types are hashed constantly by the algebra's caches; hash each node once
    h = self.__dict__.get("_hash")
    if h is None:
        h = hash((type(self).__name__,) + tuple(
            getattr(self, f.name) for f in fields(self) if f.compare))
        object.__setattr__(self, "_hash", h)
    return h


for _cls in (Prim, NumLitT, TupleT, ListT, MapT, RecordT, FuncT, UnionT, TypeVar, AliasRef):
    _cls.__hash__ = _cached_hash
PRIM_ORDER = {p: i for p, i in PRIM_ORDER.items()}  # rehash under the cached hash


def _num(v) -> str:
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return str(v)


def members(t: Type) -> tuple:
    """Union members, or ``(t,)`` for anything else. Does not unfold aliases."""
    if isinstance(t, UnionT):
        return tuple(sorted(t.members, key=sort_key))
    if t == BOTTOM:
        return ()
    return (t,)


def sort_key(t: Type):
    """Base types first (fixed order), then literals, then composites by text."""
    if isinstance(t, Prim):
        return (0, PRIM_ORDER[t], "")
    if isinstance(t, NumLitT):
        return (1, t.value, "")
    return (2, 0, render(t))


def render(t: Type) -> str:
    match t:
        case Prim(name):
            return name
        case NumLitT(value):
            return _num(value)
        case TupleT(elems):
            return "Tuple(" + ", ".join(render(e) for e in elems) + ")"
        case ListT(elem):
            return f"List({render(elem)})"
        case MapT(value):
            return f"Object({render(value)})"
        case RecordT(name) | TypeVar(name) | AliasRef(name):
            return name
        case UnionT():
            return " | ".join(
                f"({render(m)})" if isinstance(m, FuncT) else render(m) for m in members(t)
            )
        case FuncT(params, ret, latent, names):
            parts = []
            for i, p in enumerate(params):
                name = names[i] if i < len(names) and names[i] else None
                if latent is not None and latent.index == i and name is None:
                    name = f"_{i}"
                parts.append(f"{name}: {render(p)}" if name else render(p))
            if latent is None:
                out = render(ret)
            else:
                subject = parts[latent.index].split(":")[0]
                prefix = "implies " if latent.kind == ASYMMETRIC else ""
                out = f"{prefix}{subject} is {render(latent.target)}"
            return f"({', '.join(parts)}) -> {out}"
    raise TypeError(f"not a type: {t!r}")


def union(*ts: Type) -> Type:
    """Flatten ``ts`` into a union without subsumption (see Algebra.normalize)."""
    flat = set()
    for t in ts:
        if isinstance(t, UnionT):
            flat |= t.members
        elif t == TOP:
            return TOP
        elif t != BOTTOM:
            flat.add(t)
    if not flat:
        return BOTTOM
    if len(flat) == 1:
        return next(iter(flat))
    return UnionT(frozenset(flat))


def size(t: Type) -> int:
    """Node count; used to pick the smaller operand on irreducible intersections."""
    match t:
        case TupleT(elems):
            return 1 + sum(size(e) for e in elems)
        case ListT(x) | MapT(x):
            return 1 + size(x)
        case UnionT(ms):
            return 1 + sum(size(m) for m in ms)
        case FuncT(params, ret, latent):
            extra = size(latent.target) if latent else 0
            return 1 + sum(size(p) for p in params) + size(ret) + extra
    return 1


def widen(t: Type) -> Type:
    """Forget literal precision: numeric literals become Number, True/False Boolean."""
    match t:
        case NumLitT():
            return NUMBER
        case Prim() if t in (TRUE, FALSE):
            return BOOLEAN
        case UnionT(ms):
            return union(*(widen(m) for m in ms))
    return t


def substitute(t: Type, subst: dict) -> Type:
    """Replace type variables by name."""
    if not subst:
        return t
    match t:
        case TypeVar(name):
            return subst.get(name, t)
        case TupleT(elems):
            return TupleT(tuple(substitute(e, subst) for e in elems))
        case ListT(elem):
            return ListT(substitute(elem, subst))
        case MapT(value):
            return MapT(substitute(value, subst))
        case UnionT(ms):
            return union(*(substitute(m, subst) for m in ms))
        case FuncT(params, ret, latent, names):
            lat = None
            if latent is not None:
                lat = LatentPred(latent.kind, latent.index, substitute(latent.target, subst))
            return FuncT(tuple(substitute(p, subst) for p in params), substitute(ret, subst), lat, names)
    return t


def free_vars(t: Type) -> set[str]:
    match t:
        case TypeVar(name):
            return {name}
        case TupleT(elems):
            return set().union(*(free_vars(e) for e in elems)) if elems else set()
        case ListT(x) | MapT(x):
            return free_vars(x)
        case UnionT(ms):
            return set().union(*(free_vars(m) for m in ms))
        case FuncT(params, ret, latent):
            out = free_vars(ret)
            for p in params:
                out |= free_vars(p)
            if latent is not None:
                out |= free_vars(latent.target)
            return out
    return set()
