"""Normalization, subtyping, and the intersect/subtract metafunctions.

All operations are syntactic approximations of the set-theoretic ones:
``intersect`` and ``subtract`` may return a larger type than the true
intersection or difference, never a smaller one.
"""

from __future__ import annotations

from itertools import product

from .types import (
    ASYMMETRIC, BOOLEAN, BOTTOM, FALSE, NUMBER, SYMMETRIC, TOP, TRUE,
    AliasRef, FuncT, LatentPred, ListT, MapT, NumLitT, Prim, RecordT, TupleT,
    Type, TypeVar, UnionT, size, sort_key, union,
)

# Caps the tuple-distribution product in subtype checks.
MAX_EXPANSION = 256
# Guards mutual recursion through aliases in intersect/subtract.
MAX_DEPTH = 48


class Algebra:
    """Type operations relative to a frozen table of record and alias declarations."""

    def __init__(self, records: dict | None = None, aliases: dict | None = None):
        self.records = dict(records or {})
        self.aliases = dict(aliases or {})
        self._sub_cache: dict = {}
        self._norm_cache: dict = {}
        self._meet_cache: dict = {}
        self._minus_cache: dict = {}

    # -- aliases ------------------------------------------------------------

    def unfold(self, t: Type) -> Type:
        seen = set()
        while isinstance(t, AliasRef):
            if t.name in seen:
                return BOTTOM
            seen.add(t.name)
            t = self.aliases[t.name]
        return t

    def atoms(self, t: Type) -> list[Type]:
        """Union members with aliases unfolded, flattened, Bottom dropped."""
        out: list[Type] = []
        self._atoms(t, out, set())
        return out

    def _atoms(self, t, out, seen):
        if isinstance(t, AliasRef):
            if t.name in seen:
                return
            self._atoms(self.aliases[t.name], out, seen | {t.name})
        elif isinstance(t, UnionT):
            for m in sorted(t.members, key=sort_key):
                self._atoms(m, out, seen)
        elif t != BOTTOM and t not in out:
            out.append(t)

    def field_type(self, record: str, name: str) -> Type | None:
        for fname, ftype in self.records.get(record, ()):
            if fname == name:
                return ftype
        return None

    # -- normalize ----------------------------------------------------------

    def normalize(self, t: Type) -> Type:
        cached = self._norm_cache.get(t)
        if cached is not None:
            return cached
        out = self._normalize(t)
        self._norm_cache[t] = out
        return out

    def _normalize(self, t: Type) -> Type:
        match t:
            case UnionT(ms):
                flat = union(*(self.normalize(m) for m in ms))
                if not isinstance(flat, UnionT):
                    return flat
                items = set(flat.members)
                if TRUE in items and FALSE in items:
                    items -= {TRUE, FALSE}
                    items.add(BOOLEAN)
                ordered = sorted(items, key=sort_key)
                kept = []
                for m in ordered:
                    dominated = False
                    for n in ordered:
                        if n is m or n == m:
                            continue
                        if self.subtype(m, n) and (not self.subtype(n, m) or sort_key(n) < sort_key(m)):
                            dominated = True
                            break
                    if not dominated:
                        kept.append(m)
                return union(*kept)
            case TupleT(elems):
                elems = tuple(self.normalize(e) for e in elems)
                if any(self.is_empty(e) for e in elems):
                    return BOTTOM
                return TupleT(elems)
            case ListT(elem):
                return ListT(self.normalize(elem))
            case MapT(value):
                return MapT(self.normalize(value))
            case FuncT(params, ret, latent, names):
                lat = None
                if latent is not None:
                    lat = LatentPred(latent.kind, latent.index, self.normalize(latent.target))
                return FuncT(tuple(self.normalize(p) for p in params), self.normalize(ret), lat, names)
        return t

    # -- subtyping ----------------------------------------------------------

    def subtype(self, a: Type, b: Type) -> bool:
        key = (a, b)
        hit = self._sub_cache.get(key)
        if hit is None:
            hit = self._sub(a, b, frozenset())
            self._sub_cache[key] = hit
        return hit

    def equivalent(self, a: Type, b: Type) -> bool:
        return self.subtype(a, b) and self.subtype(b, a)

    def _sub(self, a: Type, b: Type, assume: frozenset) -> bool:
        if a == b or b == TOP or a == BOTTOM:
            return True
        if isinstance(a, AliasRef):
            if (a, b) in assume:
                return True
            return self._sub(self.aliases[a.name], b, assume | {(a, b)})
        if isinstance(a, UnionT):
            return all(self._sub(m, b, assume) for m in a.members)
        if a == TOP:
            return False
        if isinstance(b, AliasRef):
            if (a, b) in assume:
                return True
            return self._sub(a, self.aliases[b.name], assume | {(a, b)})
        if isinstance(b, UnionT):
            if any(self._sub(a, m, assume) for m in b.members):
                return True
            parts = self._split(a)
            if parts is not None:
                return all(any(self._sub(p, m, assume) for m in b.members) for p in parts)
            return False
        return self._sub_atom(a, b, assume)

    def _split(self, a: Type) -> list[Type] | None:
        """Finer covering of ``a`` for union checks: Boolean and tuples of unions."""
        if a == BOOLEAN:
            return [TRUE, FALSE]
        if isinstance(a, TupleT):
            options = []
            for e in a.elems:
                opts = []
                for x in self.atoms(e) if isinstance(e, (UnionT, AliasRef)) else [e]:
                    opts.extend([TRUE, FALSE] if x == BOOLEAN else [x])
                options.append(opts or [BOTTOM])
            count = 1
            for o in options:
                count *= len(o)
            if count <= 1 or count > MAX_EXPANSION:
                return None
            return [TupleT(combo) for combo in product(*options)]
        return None

    def _sub_atom(self, a: Type, b: Type, assume: frozenset) -> bool:
        match a, b:
            case Prim(), Prim():
                return b == BOOLEAN and a in (TRUE, FALSE)
            case NumLitT(), Prim():
                return b == NUMBER
            case TupleT(xs), TupleT(ys):
                return len(xs) == len(ys) and all(self._sub(x, y, assume) for x, y in zip(xs, ys))
            case ListT(x), ListT(y):
                return self._sub(x, y, assume)
            case MapT(x), MapT(y):
                return self._sub(x, y, assume)
            case RecordT(n), RecordT(m):
                return n == m
            case FuncT(), FuncT():
                return self._sub_func(a, b, assume)
        return False

    def _sub_func(self, a: FuncT, b: FuncT, assume: frozenset) -> bool:
        if len(a.params) != len(b.params):
            return False
        if not all(self._sub(y, x, assume) for x, y in zip(a.params, b.params)):
            return False
        if not self._sub(a.ret, b.ret, assume):
            return False
        la, lb = a.latent, b.latent
        if lb is None:
            return True
        if la is None or la.index != lb.index:
            return False
        if lb.kind == SYMMETRIC:
            return (
                la.kind == SYMMETRIC
                and self._sub(la.target, lb.target, assume)
                and self._sub(lb.target, la.target, assume)
            )
        return self._sub(la.target, lb.target, assume)

    # -- emptiness ----------------------------------------------------------

    def is_empty(self, t: Type, _seen: frozenset = frozenset()) -> bool:
        if t == BOTTOM:
            return True
        match t:
            case TupleT(elems):
                return any(self.is_empty(e, _seen) for e in elems)
            case UnionT(ms):
                return all(self.is_empty(m, _seen) for m in ms)
            case AliasRef(name):
                if name in _seen:
                    return False
                return self.is_empty(self.aliases[name], _seen | {name})
        return False

    # -- intersect ----------------------------------------------------------

    def intersect(self, a: Type, b: Type) -> Type:
        key = (a, b)
        cached = self._meet_cache.get(key)
        if cached is None:
            cached = self._meet_cache[key] = self.normalize(self._meet(a, b, frozenset(), 0))
        return cached

    def _meet(self, a: Type, b: Type, seen: frozenset, depth: int) -> Type:
        if self.subtype(a, b):
            return a
        if self.subtype(b, a):
            return b
        if depth > MAX_DEPTH:
            return _smaller(a, b)
        if isinstance(a, AliasRef) or isinstance(b, AliasRef):
            if (a, b) in seen:
                return a if isinstance(a, AliasRef) else b
            seen = seen | {(a, b)}
            a2 = self.aliases[a.name] if isinstance(a, AliasRef) else a
            b2 = self.aliases[b.name] if isinstance(b, AliasRef) else b
            return self._meet(a2, b2, seen, depth + 1)
        if isinstance(a, UnionT):
            return union(*(self._meet(m, b, seen, depth + 1) for m in sorted(a.members, key=sort_key)))
        if isinstance(b, UnionT):
            return union(*(self._meet(a, m, seen, depth + 1) for m in sorted(b.members, key=sort_key)))
        if isinstance(a, TypeVar) or isinstance(b, TypeVar):
            return _smaller(a, b)
        match a, b:
            case TupleT(xs), TupleT(ys):
                if len(xs) != len(ys):
                    return BOTTOM
                elems = tuple(self.normalize(self._meet(x, y, seen, depth + 1)) for x, y in zip(xs, ys))
                if any(self.is_empty(e) for e in elems):
                    return BOTTOM
                return TupleT(elems)
            case ListT(x), ListT(y):
                return ListT(self.normalize(self._meet(x, y, seen, depth + 1)))
            case MapT(x), MapT(y):
                return MapT(self.normalize(self._meet(x, y, seen, depth + 1)))
            case FuncT(), FuncT():
                return _smaller(a, b)
        # distinct base types, literals, records, or constructor kinds
        return BOTTOM

    # -- subtract -----------------------------------------------------------

    def subtract(self, a: Type, b: Type) -> Type:
        key = (a, b)
        cached = self._minus_cache.get(key)
        if cached is None:
            cached = self._minus_cache[key] = self.normalize(self._minus(a, b, frozenset(), 0))
        return cached

    def _minus(self, a: Type, b: Type, seen: frozenset, depth: int) -> Type:
        if self.subtype(a, b):
            return BOTTOM
        if depth > MAX_DEPTH:
            return a
        if isinstance(a, AliasRef):
            if (a, b) in seen:
                return a
            return self._minus(self.aliases[a.name], b, seen | {(a, b)}, depth + 1)
        if isinstance(a, UnionT):
            return union(*(self._minus(m, b, seen, depth + 1) for m in sorted(a.members, key=sort_key)))
        if isinstance(b, AliasRef):
            if (a, b) in seen:
                return a
            return self._minus(a, self.aliases[b.name], seen | {(a, b)}, depth + 1)
        if isinstance(b, UnionT):
            out = a
            for m in sorted(b.members, key=sort_key):
                out = self.normalize(self._minus(out, m, seen, depth + 1))
            return out
        if a == BOOLEAN and b == TRUE:
            return FALSE
        if a == BOOLEAN and b == FALSE:
            return TRUE
        if isinstance(a, TypeVar) or isinstance(b, TypeVar):
            return a
        if self.is_empty(self.intersect(a, b)):
            return a
        if isinstance(a, TupleT) and isinstance(b, TupleT) and len(a.elems) == len(b.elems):
            loose = [i for i, (x, y) in enumerate(zip(a.elems, b.elems)) if not self.subtype(x, y)]
            if len(loose) == 1:
                j = loose[0]
                rest = self.normalize(self._minus(a.elems[j], b.elems[j], seen, depth + 1))
                if self.is_empty(rest):
                    return BOTTOM
                return TupleT(a.elems[:j] + (rest,) + a.elems[j + 1 :])
        return a

    # -- tuple arity --------------------------------------------------------

    def arity_filter(self, t: Type, n: int, keep: bool) -> Type:
        out = []
        for m in self.atoms(t):
            is_n_tuple = isinstance(m, TupleT) and len(m.elems) == n
            if is_n_tuple == keep:
                out.append(m)
        return self.normalize(union(*out))


def _smaller(a: Type, b: Type) -> Type:
    # Either operand over-approximates the intersection; prefer the tested one on ties.
    return b if size(b) <= size(a) else a


_DEFAULT = Algebra()


def normalize(t: Type) -> Type:
    return _DEFAULT.normalize(t)


def subtype(a: Type, b: Type) -> bool:
    return _DEFAULT.subtype(a, b)


def intersect(a: Type, b: Type) -> Type:
    return _DEFAULT.intersect(a, b)


def subtract(a: Type, b: Type) -> Type:
    return _DEFAULT.subtract(a, b)


def is_empty(t: Type) -> bool:
    return _DEFAULT.is_empty(t)


def arity_filter(t: Type, n: int, keep: bool) -> Type:
    return _DEFAULT.arity_filter(t, n, keep)


__all__ = [
    "Algebra", "normalize", "subtype", "intersect", "subtract", "is_empty",
    "arity_filter", "ASYMMETRIC", "SYMMETRIC",
]
