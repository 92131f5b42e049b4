"""Fixed 373-token vocabulary and the CIF text <-> token id mapping.

The vocabulary ships as a bit-exact TSV asset (id, category, token):
13 specials, 10 digits, 31 CIF tags, 89 element symbols, 230 space-group
symbols. Encoding is longest-match with category priority
spacegroup > cif_tag > atom > digit/special, with backtracking so that
any tokenizable text is tokenized.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .exceptions import IdOutOfRange, UnknownToken

TokenSequence = list[int]

# rendering of the non-printing specials
SPACE_TOKEN = "<space>"
NEWLINE_TOKEN = "<newline>"
UNK_GLYPH = "?"  # sentinel used when decoding <unk>; deliberately not re-encodable

_CATEGORY_PRIORITY = {"spacegroup": 0, "cif_tag": 1, "atom": 2, "digit": 3, "special": 3}

EXPECTED_CATEGORY_COUNTS = {"atom": 89, "cif_tag": 31, "spacegroup": 230, "digit": 10, "special": 13}


@dataclass(frozen=True)
class VocabEntry:
    id: int
    category: str
    token: str


class Vocabulary:
    """Immutable token table; construct via :func:`load_vocabulary`."""

    def __init__(self, entries: list[VocabEntry], content_hash: str):
        counts: dict[str, int] = {}
        for e in entries:
            counts[e.category] = counts.get(e.category, 0) + 1
        if counts != EXPECTED_CATEGORY_COUNTS:
            raise RuntimeError(f"vocabulary category counts wrong: {counts}")
        if [e.id for e in entries] != list(range(len(entries))):
            raise RuntimeError("vocabulary ids are not dense 0..N-1")
        if len({e.token for e in entries}) != len(entries):
            raise RuntimeError("duplicate token strings in vocabulary")

        self.entries = tuple(entries)
        self.content_hash = content_hash
        self._token_to_entry = {e.token: e for e in entries}
        self._id_to_entry = {e.id: e for e in entries}

        self.cond_id = self._token_to_entry["<cond>"].id
        self.pad_id = self._token_to_entry["<pad>"].id
        self.unk_id = self._token_to_entry["<unk>"].id
        self.space_id = self._token_to_entry[SPACE_TOKEN].id
        self.newline_id = self._token_to_entry[NEWLINE_TOKEN].id

        # matchable text fragments: every token except the three meta specials,
        # with <space>/<newline> standing for ' ' and '\n'
        matchable: list[tuple[str, int, int]] = []  # (text, id, priority)
        for e in entries:
            if e.token in ("<cond>", "<pad>", "<unk>"):
                continue
            text = {SPACE_TOKEN: " ", NEWLINE_TOKEN: "\n"}.get(e.token, e.token)
            matchable.append((text, e.id, _CATEGORY_PRIORITY[e.category]))
        by_first: dict[str, list[tuple[str, int, int]]] = {}
        for text, tid, prio in matchable:
            by_first.setdefault(text[0], []).append((text, tid, prio))
        for cands in by_first.values():
            cands.sort(key=lambda t: (-len(t[0]), t[2]))
        self._candidates = by_first
        self._max_token_len = max(len(t) for t, _, _ in matchable)

    def __len__(self) -> int:
        return len(self.entries)

    def token(self, token_id: int) -> str:
        try:
            return self._id_to_entry[token_id].token
        except KeyError:
            raise IdOutOfRange(f"token id {token_id} outside 0..{len(self.entries) - 1}") from None

    def id_of(self, token: str) -> int:
        return self._token_to_entry[token].id

    def category_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for e in self.entries:
            counts[e.category] = counts.get(e.category, 0) + 1
        return counts

    # -- encoding ----------------------------------------------------------

    def encode(self, text: str) -> TokenSequence:
        """Tokenize standardized CIF text.

        Longest match with category priority; a dynamic program over
        suffix tokenizability guarantees that a valid segmentation is
        found whenever one exists. Raises UnknownToken (with the byte
        offset where a greedy scan gets stuck) otherwise.
        """
        n = len(text)
        ok = [False] * (n + 1)
        choice: list[tuple[int, int] | None] = [None] * n  # (token id, match length)
        ok[n] = True
        for i in range(n - 1, -1, -1):
            for tok, tid, _prio in self._candidates.get(text[i], ()):
                if ok[i + len(tok)] and text.startswith(tok, i):
                    ok[i] = True
                    choice[i] = (tid, len(tok))
                    break  # candidates are pre-sorted by (length desc, priority)
        if not ok[0]:
            i = 0
            while i < n:  # greedy walk to locate the stuck offset
                for tok, _tid, _prio in self._candidates.get(text[i], ()):
                    if text.startswith(tok, i):
                        i += len(tok)
                        break
                else:
                    break
            raise UnknownToken(f"cannot tokenize {text[i:i + 12]!r}", offset=i)
        ids: TokenSequence = []
        i = 0
        while i < n:
            tid, length = choice[i]
            ids.append(tid)
            i += length
        return ids

    def decode(self, ids: TokenSequence) -> str:
        """Concatenate token strings; <space>/<newline> render as ' '/'\\n',
        <unk> as the sentinel glyph, <pad>/<cond> as empty strings."""
        parts = []
        for tid in ids:
            tok = self.token(tid)
            if tok == SPACE_TOKEN:
                parts.append(" ")
            elif tok == NEWLINE_TOKEN:
                parts.append("\n")
            elif tok == "<unk>":
                parts.append(UNK_GLYPH)
            elif tok in ("<pad>", "<cond>"):
                parts.append("")
            else:
                parts.append(tok)
        return "".join(parts)


@lru_cache(maxsize=1)
def load_vocabulary() -> Vocabulary:
    raw = resources.files("pxrdgen.data").joinpath("vocab.tsv").read_bytes()
    content_hash = hashlib.sha256(raw).hexdigest()
    entries = []
    for line in raw.decode("utf-8").splitlines()[1:]:
        tid, category, token = line.split("\t")
        entries.append(VocabEntry(id=int(tid), category=category, token=token))
    return Vocabulary(entries, content_hash)
