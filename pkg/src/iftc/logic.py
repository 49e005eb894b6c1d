"""Propositions over paths and the flow-sensitive environment they refine.

An expression used as a test yields a positive proposition (true for the
then-branch) and a negative one (for the else-branch). ``update`` applies a
proposition to an environment; ``join`` merges the environments of branches
that meet again; ``proves`` decides entailment for predicate verification.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .diagnostics import IftError, NO_SPAN, Span
from .typealg import Algebra
from .types import (
    BOTTOM, NUMBER, ListT, MapT, NumLitT, RecordT, TupleT, Type, render, union,
)


class ProjectionError(IftError):
    code = "E101"


# -- paths ------------------------------------------------------------------

@dataclass(frozen=True)
class Field:
    name: str

    def __str__(self) -> str:
        return f".{self.name}"


@dataclass(frozen=True)
class Idx:
    index: int

    def __str__(self) -> str:
        return f"[{self.index}]"


@dataclass(frozen=True)
class Length:
    def __str__(self) -> str:
        return ".length"


LENGTH = Length()


@dataclass(frozen=True)
class Path:
    root: str
    elems: tuple = ()

    def extend(self, elem) -> "Path":
        return Path(self.root, self.elems + (elem,))

    @property
    def parent(self) -> "Path":
        return Path(self.root, self.elems[:-1])

    def has_prefix(self, other: "Path") -> bool:
        return self.root == other.root and self.elems[: len(other.elems)] == other.elems

    def __str__(self) -> str:
        return self.root + "".join(str(e) for e in self.elems)


def var(name: str, *elems) -> Path:
    return Path(name, tuple(elems))


# -- propositions -----------------------------------------------------------

class Prop:
    __slots__ = ()


@dataclass(frozen=True)
class TTProp(Prop):
    def __str__(self) -> str:
        return "TT"


@dataclass(frozen=True)
class FFProp(Prop):
    def __str__(self) -> str:
        return "FF"


TT = TTProp()
FF = FFProp()


@dataclass(frozen=True)
class Is(Prop):
    path: Path
    type: Type

    def __str__(self) -> str:
        return f"{self.path} is {render(self.type)}"


@dataclass(frozen=True)
class IsNot(Prop):
    path: Path
    type: Type

    def __str__(self) -> str:
        return f"{self.path} !is {render(self.type)}"


@dataclass(frozen=True)
class HasFieldP(Prop):
    path: Path
    key: str

    def __str__(self) -> str:
        return f"has_field({self.path}, {self.key!r})"


@dataclass(frozen=True)
class And(Prop):
    left: Prop
    right: Prop

    def __str__(self) -> str:
        return f"({self.left} & {self.right})"


@dataclass(frozen=True)
class Or(Prop):
    left: Prop
    right: Prop

    def __str__(self) -> str:
        return f"({self.left} | {self.right})"


def conj(a: Prop, b: Prop) -> Prop:
    if a == FF or b == FF:
        return FF
    if a == TT:
        return b
    if b == TT or a == b:
        return a
    return And(a, b)


def disj(a: Prop, b: Prop) -> Prop:
    if a == TT or b == TT:
        return TT
    if a == FF:
        return b
    if b == FF or a == b:
        return a
    return Or(a, b)


def prop_paths(p: Prop) -> set[Path]:
    match p:
        case Is(path) | IsNot(path) | HasFieldP(path):
            return {path}
        case And(a, b) | Or(a, b):
            return prop_paths(a) | prop_paths(b)
    return set()


# -- environments -----------------------------------------------------------

@dataclass(frozen=True)
class Binding:
    type: Type
    mutable: bool


@dataclass(frozen=True)
class Env:
    """Immutable typing environment; every operation returns a new Env."""

    bindings: dict = field(default_factory=dict)  # name -> Binding
    refinements: dict = field(default_factory=dict)  # Path -> Type
    aliases: dict = field(default_factory=dict)  # name -> (pos Prop, neg Prop)
    facts: frozenset = frozenset()  # {(Path, key)}
    live: bool = True
    # (Path, Type) pairs ruled out by negative tests; subtraction cannot
    # always express them (Top minus String is still Top)
    excluded: frozenset = frozenset()

    def bind(self, name: str, type: Type, mutable: bool = False) -> "Env":
        env = self.forget(name)
        bindings = dict(env.bindings)
        bindings[name] = Binding(type, mutable)
        return replace(env, bindings=bindings)

    def unbind(self, names) -> "Env":
        names = set(names)
        if not names:
            return self
        env = self
        for n in names:
            env = env.forget(n)
        return replace(env, bindings={k: v for k, v in env.bindings.items() if k not in names})

    def forget(self, name: str) -> "Env":
        """Drop everything known about ``name`` beyond its declared type."""
        refinements = {p: t for p, t in self.refinements.items() if p.root != name}
        aliases = {
            k: v for k, v in self.aliases.items()
            if k != name and all(p.root != name for p in prop_paths(v[0]) | prop_paths(v[1]))
        }
        facts = frozenset(f for f in self.facts if f[0].root != name)
        excluded = frozenset(f for f in self.excluded if f[0].root != name)
        return replace(self, refinements=refinements, aliases=aliases, facts=facts,
                       excluded=excluded)

    def refine(self, path: Path, type: Type) -> "Env":
        refinements = dict(self.refinements)
        refinements[path] = type
        return replace(self, refinements=refinements)

    def kill(self) -> "Env":
        return replace(self, live=False)

    def render(self) -> str:
        if not self.live:
            return "<unreachable>"
        parts = []
        for name, b in self.bindings.items():
            cur = self.refinements.get(Path(name))
            shown = render(b.type) if cur is None else f"{render(cur)} (declared {render(b.type)})"
            parts.append(f"{name}: {shown}")
        for p, t in self.refinements.items():
            if p.elems:
                parts.append(f"{p}: {render(t)}")
        for name, (pos, neg) in self.aliases.items():
            parts.append(f"{name} ~ [{pos} | {neg}]")
        for p, k in sorted(self.facts, key=str):
            parts.append(f"has_field({p}, {k!r})")
        for p, t in sorted(self.excluded, key=str):
            parts.append(f"{p} !is {render(t)}")
        return "; ".join(parts)


def bind_alias(env: Env, name: str, pos: Prop, neg: Prop) -> Env:
    aliases = dict(env.aliases)
    aliases[name] = (pos, neg)
    return replace(env, aliases=aliases)


# -- projection and lookup --------------------------------------------------

def project(alg: Algebra, t: Type, elem, strict: bool = False, span: Span = NO_SPAN) -> Type:
    """Type at ``elem`` inside a value of type ``t``.

    Union members that lack the projection are dropped, or rejected when
    ``strict`` is set. Raises ProjectionError when nothing supports it.
    """
    atoms = alg.atoms(t)
    if not atoms:
        return BOTTOM
    out = []
    for m in atoms:
        r = _project_member(alg, m, elem)
        if r is None:
            if strict:
                raise ProjectionError(f"cannot take {_elem_desc(elem)} of {render(m)}", span)
            continue
        out.append(r)
    if not out:
        raise ProjectionError(f"cannot take {_elem_desc(elem)} of {render(t)}", span)
    return alg.normalize(union(*out))


def _project_member(alg: Algebra, m: Type, elem) -> Type | None:
    match elem, m:
        case Idx(i), TupleT(elems):
            return elems[i] if 0 <= i < len(elems) else None
        case Idx(), ListT(elem_t):
            return elem_t
        case Field(name), RecordT(rname):
            return alg.field_type(rname, name)
        case Field(), MapT(value):
            return value
        case Length(), TupleT(elems):
            return NumLitT(len(elems))
        case Length(), ListT():
            return NUMBER
    return None


def _elem_desc(elem) -> str:
    match elem:
        case Idx(i):
            return f"element {i}"
        case Field(name):
            return f"field '{name}'"
    return "the length"


def lookup(env: Env, path: Path, alg: Algebra) -> Type:
    """Current type of ``path``; Bottom in an unreachable environment."""
    if not env.live:
        return BOTTOM
    if not path.elems:
        own = env.refinements.get(path)
        return own if own is not None else env.bindings[path.root].type
    proj = project(alg, lookup(env, path.parent, alg), path.elems[-1])
    own = env.refinements.get(path)
    if own is None:
        return proj
    return alg.intersect(own, proj)


# -- update -----------------------------------------------------------------

def update(env: Env, prop: Prop, alg: Algebra) -> Env:
    if not env.live:
        return env
    match prop:
        case TTProp():
            return env
        case FFProp():
            return env.kill()
        case Is(path, t):
            return _narrow(env, path, t, True, alg)
        case IsNot(path, t):
            return _narrow(env, path, t, False, alg)
        case HasFieldP(path, key):
            return replace(env, facts=env.facts | {(path, key)})
        case And(a, b):
            return update(update(env, a, alg), b, alg)
        case Or(a, b):
            return join(update(env, a, alg), update(env, b, alg), alg)
    raise TypeError(f"not a proposition: {prop!r}")


def _narrow(env: Env, path: Path, t: Type, positive: bool, alg: Algebra) -> Env:
    if path.root not in env.bindings:
        return env
    if path.elems and isinstance(path.elems[-1], Length):
        prefix = path.parent
        try:
            cur = lookup(env, prefix, alg)
        except ProjectionError:
            return env.kill()
        kept = []
        for m in alg.atoms(cur):
            length = _project_member(alg, m, LENGTH)
            if length is None:
                continue
            rest = alg.intersect(length, t) if positive else alg.subtract(length, t)
            if not alg.is_empty(rest):
                kept.append(m)
        return _refine(env, prefix, alg.normalize(union(*kept)), alg)
    try:
        cur = lookup(env, path, alg)
    except ProjectionError:
        # no remaining value has this position, so the test never ran
        return env.kill()
    def test(u):
        return alg.intersect(u, t) if positive else alg.subtract(u, t)
    env = _refine(env, path, test(cur), alg, test)
    if not positive and env.live:
        env = replace(env, excluded=env.excluded | {(path, t)})
    return env


def _refine(env: Env, path: Path, new: Type, alg: Algebra, test=None) -> Env:
    if alg.is_empty(new):
        return env.kill()
    before = lookup(env, path, alg)
    if new != before:
        env = env.refine(path, new)
    if not path.elems:
        return env
    parent = path.parent
    ptype = lookup(env, parent, alg)
    rewritten = _rewrite(alg, ptype, path.elems[-1], test or (lambda u: alg.intersect(u, new)))
    if rewritten != ptype:
        env = _refine(env, parent, rewritten, alg)
    return env


def _rewrite(alg: Algebra, parent: Type, elem, test) -> Type:
    """Apply ``test`` to the element of each union member of a container.

    Members whose element comes out empty, or that lack the element, are
    dropped; tuple members get the narrowed element written back.
    """
    kept = []
    for m in alg.atoms(parent):
        proj = _project_member(alg, m, elem)
        if proj is None:
            continue
        narrowed = test(proj)
        if alg.is_empty(narrowed):
            continue
        if isinstance(m, TupleT) and isinstance(elem, Idx):
            elems = list(m.elems)
            elems[elem.index] = narrowed
            kept.append(TupleT(tuple(elems)))
        else:
            kept.append(m)
    return alg.normalize(union(*kept))


# -- join -------------------------------------------------------------------

def join(a: Env, b: Env, alg: Algebra) -> Env:
    if not a.live:
        return b
    if not b.live:
        return a
    refinements = {}
    for path in list(a.refinements) + [p for p in b.refinements if p not in a.refinements]:
        if path.root not in a.bindings or path.root not in b.bindings:
            continue
        try:
            merged = alg.normalize(union(lookup(a, path, alg), lookup(b, path, alg)))
        except ProjectionError:
            continue
        if not path.elems and merged == a.bindings[path.root].type:
            continue
        refinements[path] = merged
    aliases = {k: v for k, v in a.aliases.items() if b.aliases.get(k) == v}
    excluded = frozenset(
        (p, t) for p, t in a.excluded | b.excluded
        if proves(a, IsNot(p, t), alg) and proves(b, IsNot(p, t), alg)
    )
    return Env(dict(a.bindings), refinements, aliases, a.facts & b.facts, True, excluded)


# -- entailment -------------------------------------------------------------

def proves(env: Env, prop: Prop, alg: Algebra) -> bool:
    if not env.live:
        return True
    match prop:
        case TTProp():
            return True
        case FFProp():
            return False
        case Is(path, t):
            try:
                return alg.subtype(lookup(env, path, alg), t)
            except ProjectionError:
                return False
        case IsNot(path, t):
            ruled_out = [u for p, u in env.excluded if p == path]
            if ruled_out and alg.subtype(t, alg.normalize(union(*ruled_out))):
                return True
            try:
                return alg.is_empty(alg.intersect(lookup(env, path, alg), t))
            except ProjectionError:
                return False
        case HasFieldP(path, key):
            return (path, key) in env.facts or _record_has(env, path, key, alg)
        case And(a, b):
            return proves(env, a, alg) and proves(env, b, alg)
        case Or(a, b):
            return proves(env, a, alg) or proves(env, b, alg)
    raise TypeError(f"not a proposition: {prop!r}")


def _record_has(env: Env, path: Path, key: str, alg: Algebra) -> bool:
    try:
        atoms = alg.atoms(lookup(env, path, alg))
    except ProjectionError:
        return False
    return bool(atoms) and all(
        isinstance(m, RecordT) and alg.field_type(m.name, key) is not None for m in atoms
    )


__all__ = [
    "Path", "Field", "Idx", "Length", "LENGTH", "var", "Prop", "TT", "FF", "Is", "IsNot",
    "HasFieldP", "And", "Or", "conj", "disj", "Env", "Binding", "lookup", "update", "join",
    "proves", "bind_alias", "project", "ProjectionError",
]
