import time
from pathlib import Path

import pytest

from iftc.typealg import Algebra

import oracle

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

# criterion number -> (passed, message); filled in by test_acceptance
ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture(scope="session")
def algebra_sweep():
    """All-pairs comparison of the algebra with the finite oracle."""
    alg = Algebra()
    types = oracle.type_universe()
    start = time.perf_counter()
    out = {"types": types, "subtype": [], "intersect": [], "subtract": [],
           "meet_bound": [], "exact": []}
    for a in types:
        da = oracle.denote(a)
        for b in types:
            db = oracle.denote(b)
            if alg.subtype(a, b) != oracle.subset(da, db):
                out["subtype"].append((a, b))
            i = alg.intersect(a, b)
            if not oracle.subset(da & db, oracle.denote(i)):
                out["intersect"].append((a, b, i))
            if not (alg.subtype(i, a) and alg.subtype(i, b)):
                out["meet_bound"].append((a, b, i))
            d = alg.subtract(a, b)
            if not oracle.subset(da & ~db, oracle.denote(d)):
                out["subtract"].append((a, b, d))
    base = oracle.base_fragment()
    for a in base:
        for b in base:
            da, db = oracle.denote(a), oracle.denote(b)
            if oracle.denote(alg.intersect(a, b)) != da & db:
                out["exact"].append(("intersect", a, b))
            if oracle.denote(alg.subtract(a, b)) != da & ~db:
                out["exact"].append(("subtract", a, b))
    out["seconds"] = time.perf_counter() - start
    return out


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, message = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {message}")
