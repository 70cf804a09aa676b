"""Python bindings for the AA shout-logging core."""

import json as _json

from . import _core
from ._core import AAError, assign_slot, dedup, normalize_nick, suffix_stem, tokenize

__all__ = ["AAError", "Store", "assign_slot", "dedup", "normalize_nick", "parse_message", "suffix_stem", "tokenize"]


def parse_message(text):
    return _json.loads(_core.parse_message(text))


class Store:
    """Shout store over a journal file, or in memory when no path is given."""

    def __init__(self, journal=None):
        self._store = _core.Store(None if journal is None else str(journal))

    def shout(self, nick, msg):
        return self._store.shout(nick, msg)

    def message(self, nick, msg):
        return _json.loads(self._store.message(nick, msg))

    def shouts(self, format="json"):
        text = self._store.shouts(format)
        return text if format == "text" else _json.loads(text)

    def report(self, n=None):
        return _json.loads(self._store.report(n))

    def review(self, session, reviewer, score):
        return _json.loads(self._store.review(session, reviewer, score))

    def ntriples(self):
        return self._store.ntriples()

    def violations(self):
        return _json.loads(self._store.violations())

    def summary(self):
        return _json.loads(self._store.summary())
