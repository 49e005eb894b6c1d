"""Command-line driver: check files, run the benchmark corpus, evaluate calls."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import checker, interp
from .diagnostics import IftError, format_json
from .syntax import nodes as N
from .syntax.lexer import Tok, tokenize
from .syntax.parser import parse_program
from .syntax.resolve import resolve

# Benchmark items in table order, followed by the example programs.
ITEM_ORDER = (
    "positive", "negative", "connectives", "nesting_body",
    "struct_fields", "tuple_elements", "tuple_length",
    "alias", "nesting_condition", "merge_with_union",
    "predicate_2way", "predicate_1way", "predicate_checked",
    "filter", "flatten", "tree_node", "rainfall",
)

SUCCESS, FAILURE = "success", "failure"
FORMATS = ("text", "md", "tex")


class CorpusError(Exception):
    """Malformed corpus layout or inconsistent expectation markers."""


@dataclass(frozen=True)
class Expectation:
    file: str
    verdict: str
    error_lines: frozenset = frozenset()


def parse_expectations(path) -> Expectation:
    path = Path(path)
    stem = path.stem
    if stem.endswith("_success"):
        verdict = SUCCESS
    elif stem.endswith("_failure"):
        verdict = FAILURE
    else:
        raise CorpusError(f"{path}: name must end in _success or _failure")
    tokens = tokenize(path.read_text(encoding="utf-8"), str(path))
    lines = frozenset(t.line for t in tokens if t.kind == Tok.EXPECT_ERROR)
    if verdict == FAILURE and not lines:
        raise CorpusError(f"{path}: failure file has no expect-error markers")
    if verdict == SUCCESS and lines:
        raise CorpusError(f"{path}: success file has expect-error markers")
    return Expectation(str(path), verdict, lines)


# -- bench ------------------------------------------------------------------

@dataclass(frozen=True)
class Row:
    item: str
    passed: bool
    details: tuple = ()
    extras: int = 0


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(r.passed for r in self.rows)

    @property
    def ok(self) -> bool:
        return self.passed == len(self.rows)

    def render(self, fmt: str = "text") -> str:
        if fmt == "tex":
            return self._tex()
        if fmt == "md":
            return self._md()
        return self._text()

    def _mark(self, row: Row) -> str:
        return "O" if row.passed else "X"

    def _summary(self) -> str:
        return f"{self.passed}/{len(self.rows)} passed"

    def _detail_lines(self) -> list[str]:
        out = []
        for r in self.rows:
            out.extend(f"{r.item}: {d}" for d in r.details)
            if r.extras:
                out.append(f"{r.item}: {r.extras} extra diagnostic(s) inside expected functions")
        return out

    def _text(self) -> str:
        width = max([len("Benchmark")] + [len(r.item) for r in self.rows]) + 2
        lines = ["Benchmark".ljust(width) + "iftc"]
        lines += [r.item.ljust(width) + self._mark(r) for r in self.rows]
        lines.append(self._summary())
        lines += self._detail_lines()
        return "\n".join(lines) + "\n"

    def _md(self) -> str:
        lines = ["| Benchmark | iftc |", "|---|---|"]
        lines += [f"| {r.item} | {self._mark(r)} |" for r in self.rows]
        lines += ["", self._summary()]
        lines += [f"- {d}" for d in self._detail_lines()]
        return "\n".join(lines) + "\n"

    def _tex(self) -> str:
        lines = ["Benchmark & iftc \\\\"]
        lines += [_tex_escape(r.item) + f" & {self._mark(r)} \\\\" for r in self.rows]
        lines.append(f"% {self._summary()}")
        lines += [f"% {d}" for d in self._detail_lines()]
        return "\n".join(lines) + "\n"


def _tex_escape(text: str) -> str:
    return text.replace("_", r"\_")


def _function_ranges(path: Path) -> list[tuple[int, int]]:
    try:
        program = parse_program(tokenize(path.read_text(encoding="utf-8"), str(path)), str(path))
    except IftError:
        return []
    return [(f.span.line, f.end_line) for f in program.decls if isinstance(f, N.FunDef)]


def bench_item(item: str, success: Path, failure: Path) -> Row:
    details = []
    parse_expectations(success)
    exp = parse_expectations(failure)
    for d in checker.check_file(success):
        details.append(f"unexpected {d.format()}")
    diags = checker.check_file(failure)
    hit = {d.line for d in diags}
    for line in sorted(exp.error_lines - hit):
        details.append(f"missed expected error at {failure}:{line}")
    ranges = [r for r in _function_ranges(failure) if any(r[0] <= ln <= r[1] for ln in exp.error_lines)]
    extras = 0
    for d in diags:
        if d.line in exp.error_lines:
            continue
        if any(lo <= d.line <= hi for lo, hi in ranges):
            extras += 1
        else:
            details.append(f"stray {d.format()}")
    return Row(item, not details, tuple(details), extras)


def discover(corpus: Path) -> list[tuple[str, Path, Path]]:
    if not corpus.is_dir():
        raise CorpusError(f"{corpus}: not a directory")
    items: dict[str, dict[str, Path]] = {}
    for p in sorted(corpus.glob("*.ift")):
        for verdict in (SUCCESS, FAILURE):
            suffix = f"_{verdict}"
            if p.stem.endswith(suffix):
                items.setdefault(p.stem[: -len(suffix)], {})[verdict] = p
                break
        else:
            raise CorpusError(f"{p}: name must end in _success or _failure")
    if not items:
        raise CorpusError(f"{corpus}: no benchmark files")
    for item, pair in items.items():
        missing = {SUCCESS, FAILURE} - set(pair)
        if missing:
            raise CorpusError(f"{corpus}: item '{item}' lacks a {missing.pop()} file")
    rank = {name: i for i, name in enumerate(ITEM_ORDER)}
    order = sorted(items, key=lambda n: (rank.get(n, len(rank)), n))
    return [(n, items[n][SUCCESS], items[n][FAILURE]) for n in order]


def run_bench(corpus) -> BenchReport:
    """Check every item of a corpus directory against its expectations."""
    return BenchReport([bench_item(*entry) for entry in discover(Path(corpus))])


# -- check ------------------------------------------------------------------

def _tracer(path, err):
    def trace(stmt, env):
        print(f"{path}:{stmt.span.line}: {env.render()}", file=err)
    return trace


def run_check(paths, fmt: str = "text", trace_env: bool = False, err=None) -> int:
    err = err or sys.stderr
    diags = []
    for p in paths:
        trace = _tracer(p, err) if trace_env else None
        try:
            diags.extend(checker.check_file(p, trace))
        except OSError as e:
            print(f"iftc: cannot read {p}: {e.strerror or e}", file=err)
            return 2
        except Exception as e:  # a checker bug, not a user error
            print(f"iftc: internal error while checking {p}: {e!r}", file=err)
            return 2
    if fmt == "json":
        print(format_json(diags), file=err)
    else:
        for d in diags:
            print(d.format(), file=err)
    return 1 if diags else 0


def run_call(path, name: str, args_text: str, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        source = Path(path).read_text(encoding="utf-8")
        rp = resolve(parse_program(tokenize(source, str(path)), str(path)))
    except OSError as e:
        print(f"iftc: cannot read {path}: {e.strerror or e}", file=err)
        return 2
    except IftError as e:
        print(str(e), file=err)
        return 2
    if name not in rp.functions:
        print(f"iftc: no function '{name}' in {path}", file=err)
        return 2
    try:
        args = interp.parse_args(args_text, rp.functions[name].type.params, rp.algebra)
    except ValueError as e:
        print(f"iftc: bad arguments: {e}", file=err)
        return 2
    try:
        value = interp.Interpreter(rp).call(name, args)
    except interp.EvalError as e:
        print(f"runtime error: {e}", file=err)
        return 1
    print(interp.show(value), file=out)
    return 0


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="iftc", description="Type narrowing checker for If-T pseudocode.")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="typecheck source files")
    c.add_argument("files", nargs="+")
    c.add_argument("-f", "--format", choices=("text", "json"), default="text")
    c.add_argument("--trace-env", action="store_true", help="print the environment before each statement")

    b = sub.add_parser("bench", help="run a benchmark corpus against its expectations")
    b.add_argument("corpus", nargs="?", default="corpus/core")
    b.add_argument("-f", "--format", choices=FORMATS, default="text")

    r = sub.add_parser("run", help="evaluate a function call")
    r.add_argument("file")
    r.add_argument("function")
    r.add_argument("args", nargs="?", default="[]", help="JSON array of arguments")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "check":
        return run_check(args.files, args.format, args.trace_env)
    if args.command == "bench":
        try:
            report = run_bench(args.corpus)
        except (CorpusError, OSError) as e:
            print(f"iftc: corpus error: {e}", file=sys.stderr)
            return 2
        sys.stdout.write(report.render(args.format))
        return 0 if report.ok else 1
    return run_call(args.file, args.function, args.args)
