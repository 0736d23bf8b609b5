"""Incremental decoding sessions and the stdio protocol behind them.

A session wraps one DecoderState + DecodeConfig so an external decoding
loop can enforce the automaton constraints token by token: open a session,
read the current mask, feed the chosen token, and ask for the auto-closing
suffix once the mask comes back empty. ``serve`` speaks a JSON-lines
request/response protocol over stdio for foreign-language callers (see the
``polich session`` CLI subcommand).
"""

from __future__ import annotations

import dataclasses
import json
from typing import IO

from . import decoder, expr, logic
from .errors import (BadConfigError, IllegalTokenError, IncompleteError,
                     PolichError, SessionClosedError)

VERSION = "0.1.0"


class Session:
    """One constrained decode stream. Not shareable across threads."""

    def __init__(self, question_count: int, config: decoder.DecodeConfig | None = None):
        self.config = config or decoder.DecodeConfig()
        self.state = decoder.initial_state(question_count)
        self.closed = False

    def _check_open(self) -> None:
        if self.closed:
            raise SessionClosedError("session is closed")

    def mask(self) -> list[str]:
        """Current mask as token spellings; empty once every question has
        been emitted (ask for the closing suffix then)."""
        self._check_open()
        if not self.state.unused:
            return []
        return [expr.token_text(t) for t in decoder.valid_tokens(self.state, self.config)]

    def step(self, token_string: str) -> list[str]:
        self._check_open()
        try:
            tokens = expr.tokenize(token_string)
        except PolichError as exc:
            raise IllegalTokenError(str(exc)) from exc
        if len(tokens) != 1:
            raise IllegalTokenError(f"expected a single token, got {token_string!r}")
        token = tokens[0]
        if token not in decoder.valid_tokens(self.state, self.config):
            raise IllegalTokenError(f"token {token_string!r} not in current mask")
        self.state = decoder.next_state(self.state, token, self.config)
        return self.mask()

    def finish(self) -> list[str]:
        """The Close tokens completing the expression; the session's stream
        ends here."""
        self._check_open()
        if self.state.unused:
            raise IncompleteError(
                f"questions remain: {sorted(self.state.unused)}")
        closes = [expr.token_text(expr.CLOSE)] * self.state.balance
        self.state = dataclasses.replace(
            self.state, balance=0,
            emitted=self.state.emitted + (expr.CLOSE,) * self.state.balance)
        return closes

    def emitted_text(self) -> str:
        return expr.to_text(self.state.emitted)

    def close(self) -> None:
        self.closed = True


def open_session(question_count: int, **config_flags) -> Session:
    try:
        config = decoder.DecodeConfig(**config_flags)
    except TypeError as exc:
        raise BadConfigError(str(exc)) from exc
    return Session(question_count, config)


def is_valid(text: str) -> bool:
    return expr.is_valid(text)


def equivalent(a: str, b: str) -> bool:
    return logic.equivalent(expr.parse_text(a), expr.parse_text(b))


def version() -> str:
    return VERSION


def serve(stdin: IO[str], stdout: IO[str]) -> None:
    """JSON-lines request/response loop. Each request is one object with an
    "op" field; responses carry "ok" plus op-specific fields, or "ok": false
    and "error". The loop ends at EOF or {"op": "exit"}."""
    sessions: dict[int, Session] = {}
    next_id = 1

    def get_session(request: dict) -> Session:
        handle = request.get("session")
        if handle not in sessions:
            raise SessionClosedError(f"unknown session {handle!r}")
        return sessions[handle]

    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
            op = request.get("op")
            if op == "exit":
                break
            if op == "open":
                session = open_session(int(request["question_count"]),
                                       **request.get("config", {}))
                sessions[next_id] = session
                response = {"ok": True, "session": next_id, "mask": session.mask()}
                next_id += 1
            elif op == "step":
                response = {"ok": True, "mask": get_session(request).step(request["token"])}
            elif op == "finish":
                response = {"ok": True, "tokens": get_session(request).finish()}
            elif op == "close":
                session = get_session(request)
                session.close()
                del sessions[request["session"]]
                response = {"ok": True}
            elif op == "is_valid":
                response = {"ok": True, "valid": is_valid(request["expr"])}
            elif op == "equivalent":
                try:
                    response = {"ok": True,
                                "equivalent": equivalent(request["a"], request["b"])}
                except PolichError as exc:
                    response = {"ok": False, "error": f"ParseError: {exc}"}
            elif op == "version":
                response = {"ok": True, "version": version()}
            else:
                response = {"ok": False, "error": f"unknown op {op!r}"}
        except PolichError as exc:
            response = {"ok": False, "error": f"{type(exc).__name__}: {exc}"}
        except (KeyError, ValueError, TypeError, json.JSONDecodeError) as exc:
            response = {"ok": False, "error": f"bad request: {exc}"}
        stdout.write(json.dumps(response) + "\n")
        stdout.flush()
