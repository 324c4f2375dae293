"""Line-oriented front end: load a task source, stage per-view deltas,
push them through the pipeline, inspect preservation, run the law suite.

Commands (one per line; ``#`` comments and blank lines are skipped):

    load <file>                     read the task source
    show                            print source and both views
    edit og|dt add <id> <name> <due>    stage an upsert for a view
    edit og|dt del <id>                 stage a deletion
    edit og complete <id>               stage a completion (elaborated)
    edit dt postpone <id> <due>         stage a postponement (elaborated)
    edit og|dt file <path>              stage a whole delta file
    put                             propagate staged deltas; report preservation
    reset                           drop staged deltas
    save <file>                     write the source canonically
    laws [fixture]                  run the law suite

A failed ``put`` reports the reason and leaves the session untouched.
Exit codes: 0 success, 1 command error, 2 law-suite failure.
"""

from __future__ import annotations

import argparse
import shlex
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .iposet import UNDEFINED
from .laws import run_fixture_suite
from .lens import PSLens, is_failure
from .tasks import (
    Delta,
    DeltaDT,
    DeltaOG,
    ParseError,
    TaskRecord,
    dt_domain,
    dtdt_domain,
    dtog_domain,
    dump_tasks,
    load_delta,
    load_tasks,
    task_pipeline,
)


class CommandError(Exception):
    """User input that cannot be executed; the session is unchanged."""


class LawSuiteFailure(Exception):
    """The law suite reported an unexpected verdict."""


@dataclass(frozen=True)
class Session:
    """One synchronization session.

    ``views`` always equals the pipeline's forward image of ``source``;
    the staged deltas are what the next ``put`` will propagate.
    """

    variant: str
    today: str
    source: dict
    views: tuple
    staged_og: object
    staged_dt: object

    @property
    def pipeline(self) -> PSLens:
        return _pipeline(self.variant, self.today)


_PIPELINES: dict[tuple, PSLens] = {}


def _pipeline(variant: str, today: str) -> PSLens:
    key = (variant, today)
    if key not in _PIPELINES:
        _PIPELINES[key] = task_pipeline(variant, today)
    return _PIPELINES[key]


def _empty_og(variant):
    return Delta() if variant == "plain" else DeltaOG()


def _empty_dt(variant):
    return Delta() if variant == "plain" else DeltaDT()


def new_session(variant: str, today: str, source: Optional[dict] = None) -> Session:
    source = {} if source is None else source
    views = _pipeline(variant, today).get(source)
    return Session(variant, today, source, views, _empty_og(variant), _empty_dt(variant))


def _render_tasks(t: dict, indent: str = "  ") -> list[str]:
    lines = dump_tasks(t).splitlines()
    return [indent + line for line in lines] or [indent + "(empty)"]


def _side_domains(session: Session):
    if session.variant == "plain":
        return dt_domain(), dt_domain()
    return dtog_domain(), dtdt_domain(session.today)


def _merge_staged(session: Session, side: str, incoming):
    """Fold a new clause or delta file into the staged delta for a side."""
    current = session.staged_og if side == "og" else session.staged_dt
    try:
        if isinstance(current, Delta):
            merged = dt_domain().merge(current, incoming)
            if merged is UNDEFINED:
                raise CommandError(f"conflicting edits staged for the {side} view")
            return merged
        if isinstance(current, DeltaOG):
            return DeltaOG(
                _united(current.adds, incoming.adds, side),
                _united(current.completes, incoming.completes, side),
                current.deletes | incoming.deletes,
            )
        return DeltaDT(
            _united(current.adds, incoming.adds, side),
            _united(current.postpones, incoming.postpones, side),
            current.deletes | incoming.deletes,
        )
    except ValueError as exc:
        raise CommandError(f"conflicting edits staged for the {side} view: {exc}") from None


def _united(a: dict, b: dict, side: str) -> dict:
    out = dict(a)
    for k, r in b.items():
        if out.get(k, r) != r:
            raise CommandError(f"conflicting edits staged for the {side} view on id {k!r}")
        out[k] = r
    return out


def _parse_edit(session: Session, args: list[str]):
    if len(args) < 2 or args[0] not in ("og", "dt"):
        raise CommandError("usage: edit og|dt add|del|complete|postpone|file ...")
    side, action, rest = args[0], args[1], args[2:]
    elaborated = session.variant == "elaborated"
    og_view, dt_view = session.views

    if action == "add":
        if len(rest) != 3:
            raise CommandError("usage: edit og|dt add <id> <name> <due>")
        key, name, due = rest
        try:
            record = TaskRecord(False, name, due)
        except ValueError as exc:
            raise CommandError(str(exc)) from None
        if side == "dt" and due != session.today:
            raise CommandError(f"tasks added to the today view must be due {session.today}")
        if not elaborated:
            incoming = Delta({key: record})
        elif side == "og":
            incoming = DeltaOG({key: record})
        else:
            incoming = DeltaDT({key: record})
    elif action == "del":
        if len(rest) != 1:
            raise CommandError("usage: edit og|dt del <id>")
        if not elaborated:
            incoming = Delta({}, {rest[0]})
        elif side == "og":
            incoming = DeltaOG(deletes={rest[0]})
        else:
            incoming = DeltaDT(deletes={rest[0]})
    elif action == "complete":
        if not (elaborated and side == "og"):
            raise CommandError("complete needs the elaborated pipeline and the og view")
        if len(rest) != 1:
            raise CommandError("usage: edit og complete <id>")
        key = rest[0]
        if key not in og_view:
            raise CommandError(f"no task {key!r} in the ongoing view")
        incoming = DeltaOG(completes={key: replace(og_view[key], done=True)})
    elif action == "postpone":
        if not (elaborated and side == "dt"):
            raise CommandError("postpone needs the elaborated pipeline and the dt view")
        if len(rest) != 2:
            raise CommandError("usage: edit dt postpone <id> <new-due>")
        key, due = rest
        if key not in dt_view:
            raise CommandError(f"no task {key!r} in the today view")
        if due == session.today:
            raise CommandError("postponing needs a different due date")
        try:
            incoming = DeltaDT(postpones={key: replace(dt_view[key], due=due)})
        except ValueError as exc:
            raise CommandError(str(exc)) from None
    elif action == "file":
        if len(rest) != 1:
            raise CommandError("usage: edit og|dt file <path>")
        shape = "plain" if not elaborated else ("ongoing" if side == "og" else "today")
        try:
            incoming = load_delta(Path(rest[0]).read_text(), shape)
        except OSError as exc:
            raise CommandError(str(exc)) from None
        except ParseError as exc:
            raise CommandError(f"{rest[0]}: {exc}") from None
    else:
        raise CommandError(f"unknown edit action {action!r}")
    return side, incoming


def run_command(session: Session, line: str) -> tuple[Session, list[str]]:
    """Execute one command line; never mutates, returns the next session."""
    try:
        tokens = shlex.split(line, comments=True)
    except ValueError as exc:
        raise CommandError(str(exc)) from None
    if not tokens:
        return session, []
    cmd, args = tokens[0], tokens[1:]

    if cmd == "load":
        if len(args) != 1:
            raise CommandError("usage: load <file>")
        try:
            source = load_tasks(Path(args[0]).read_text())
        except OSError as exc:
            raise CommandError(str(exc)) from None
        except ParseError as exc:
            raise CommandError(f"{args[0]}: {exc}") from None
        return new_session(session.variant, session.today, source), [f"loaded {len(source)} task(s)"]

    if cmd == "show":
        og_view, dt_view = session.views
        out = ["source:"] + _render_tasks(session.source)
        out += ["ongoing view:"] + _render_tasks(og_view)
        out += [f"today view ({session.today}):"] + _render_tasks(dt_view)
        return session, out

    if cmd == "edit":
        side, incoming = _parse_edit(session, args)
        merged = _merge_staged(session, side, incoming)
        if side == "og":
            return replace(session, staged_og=merged), [f"staged for og view"]
        return replace(session, staged_dt=merged), [f"staged for dt view"]

    if cmd == "put":
        if args:
            raise CommandError("usage: put")
        result = session.pipeline.put(session.source, (session.staged_og, session.staged_dt))
        if is_failure(result):
            return session, [f"{result}", "session unchanged"]
        fresh = new_session(session.variant, session.today, result)
        og_dom, dt_dom = _side_domains(session)
        out = [f"source now has {len(result)} task(s)"]
        out.append(
            "og delta preserved in refreshed view: "
            + ("yes" if og_dom.le(session.staged_og, fresh.views[0]) else "NO")
        )
        out.append(
            "dt delta preserved in refreshed view: "
            + ("yes" if dt_dom.le(session.staged_dt, fresh.views[1]) else "NO")
        )
        return fresh, out

    if cmd == "reset":
        return (
            replace(session, staged_og=_empty_og(session.variant), staged_dt=_empty_dt(session.variant)),
            ["staged deltas dropped"],
        )

    if cmd == "save":
        if len(args) != 1:
            raise CommandError("usage: save <file>")
        try:
            Path(args[0]).write_text(dump_tasks(session.source))
        except OSError as exc:
            raise CommandError(str(exc)) from None
        return session, [f"saved {args[0]}"]

    if cmd == "laws":
        lines, ok = run_fixture_suite(args or None)
        if not ok:
            raise LawSuiteFailure("\n".join(lines))
        return session, lines

    raise CommandError(f"unknown command {cmd!r}")


def run_lines(session: Session, lines, out=sys.stdout) -> Session:
    """Drive a command sequence; raises on command errors."""
    for line in lines:
        session, output = run_command(session, line)
        for text in output:
            print(text, file=out)
    return session


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="pslens",
        description="Synchronize a to-do table with its ongoing and due-today views.",
    )
    parser.add_argument("--today", default="2025-04-01", help="the due-today view's date (ISO)")
    parser.add_argument("--variant", choices=["plain", "elaborated"], default="plain")
    parser.add_argument("--script", help="batch command file (default: interactive)")
    parser.add_argument("--laws", action="store_true", help="run the law suite and exit")
    args = parser.parse_args(argv)

    if args.laws:
        lines, ok = run_fixture_suite()
        for line in lines:
            print(line)
        return 0 if ok else 2

    try:
        session = new_session(args.variant, args.today)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if args.script:
        try:
            lines = Path(args.script).read_text().splitlines()
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        try:
            run_lines(session, lines)
        except CommandError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        except LawSuiteFailure as exc:
            print(str(exc), file=sys.stderr)
            return 2
        return 0

    interactive = sys.stdin.isatty()
    while True:
        if interactive:
            print("pslens> ", end="", flush=True)
        line = sys.stdin.readline()
        if not line:
            return 0
        try:
            session, output = run_command(session, line)
        except CommandError as exc:
            print(f"error: {exc}")
            continue
        except LawSuiteFailure as exc:
            print(str(exc))
            continue
        for text in output:
            print(text)


if __name__ == "__main__":
    sys.exit(main())
