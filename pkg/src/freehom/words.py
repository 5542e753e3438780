"""Words in the fundamental group of a closed orientable surface of genus g.

Letters are nonzero integers: ``2i-1`` is a_i, ``2i`` is b_i and a negative
letter is the inverse generator.  The group is presented by a single relator
``a1 b1 A1 B1 ... ag bg Ag Bg``.

String syntax: a lowercase letter is a generator, uppercase its inverse, with
an optional index (``a`` means ``a1``).  Whitespace and commas are ignored, so
``"a1 b1 A1 B1"``, ``"a1b1A1B1"`` and ``"a b A B"`` all parse to the same word.
"""

from __future__ import annotations

import logging
import random
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

log = logging.getLogger(__name__)

_TOKEN = re.compile(r"([abAB])(\d*)")
_SEPARATORS = re.compile(r"[\s,]+")

# Past this many half-relator swaps the closure search gives up and keeps
# the best word found so far.
MAX_CLOSURE = 20000


class WordError(ValueError):
    """Malformed word string or a word that violates a precondition."""


class IdentityError(WordError):
    """The word represents the identity, so there is no closed geodesic."""


@dataclass(frozen=True)
class Word:
    letters: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __getitem__(self, item):
        return self.letters[item]

    def __mul__(self, other: "Word") -> "Word":
        """Concatenation (no reduction)."""
        return Word(self.letters + tuple(other))

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __str__(self) -> str:
        return format_word(self.letters)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({str(self)!r})"


@dataclass(frozen=True, repr=False)
class CyclicWord(Word):
    """A cyclically reduced word standing for a conjugacy class."""

    canonical: bool = False


def letter_name(x: int) -> str:
    i = (abs(x) + 1) // 2
    ch = "a" if abs(x) % 2 == 1 else "b"
    return (ch if x > 0 else ch.upper()) + str(i)


def format_word(letters: Iterable[int]) -> str:
    return "".join(letter_name(x) for x in letters)


def parse_word(text: str, genus: int | None = None) -> Word:
    compact = _SEPARATORS.sub("", text)
    letters = []
    pos = 0
    while pos < len(compact):
        m = _TOKEN.match(compact, pos)
        if m is None:
            raise WordError(f"cannot parse word {text!r} at position {pos}")
        ch, idx = m.groups()
        i = int(idx) if idx else 1
        if i < 1 or (genus is not None and i > genus):
            raise WordError(f"generator index {i} out of range in {text!r}")
        x = 2 * i - 1 if ch.lower() == "a" else 2 * i
        letters.append(x if ch.islower() else -x)
        pos = m.end()
    return Word(tuple(letters))


def as_word(w: Word | str | Sequence[int], genus: int | None = None) -> Word:
    if isinstance(w, Word):
        return w
    if isinstance(w, str):
        return parse_word(w, genus)
    return Word(tuple(w))


def letter_rank(x: int) -> int:
    """Position of a letter in the order a1 < A1 < b1 < B1 < a2 < ..."""
    return 2 * (abs(x) - 1) + (x < 0)


def shortlex_key(letters: Sequence[int]) -> tuple:
    return (len(letters), tuple(letter_rank(x) for x in letters))


def invert(w: Word) -> Word:
    return type(w)(tuple(-x for x in reversed(w.letters)))


def _free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def free_reduce(w: Word) -> Word:
    return Word(_free_reduce(w.letters))


def _cyclic_core(letters: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    i, j = 0, len(letters)
    while j - i >= 2 and letters[i] == -letters[j - 1]:
        i += 1
        j -= 1
    return letters[i:j], i


def cyclic_reduce(w: Word) -> tuple[CyclicWord, Word]:
    """Split a freely reduced word as ``conj * core * conj^-1``."""
    letters = _free_reduce(w.letters)
    core, k = _cyclic_core(letters)
    return CyclicWord(core), Word(letters[:k])


def min_rotation(letters: tuple[int, ...]) -> tuple[int, ...]:
    if not letters:
        return letters
    rots = (letters[i:] + letters[:i] for i in range(len(letters)))
    return min(rots, key=shortlex_key)


def _cyclically_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    return _cyclic_core(_free_reduce(letters))[0]


class SurfacePresentation:
    """The one-relator presentation of the genus-g surface group."""

    def __init__(self, genus: int):
        if genus < 2:
            raise WordError(f"genus must be >= 2 for a hyperbolic surface, got {genus}")
        self.genus = genus

    def __repr__(self) -> str:
        return f"SurfacePresentation(genus={self.genus})"

    def __eq__(self, other) -> bool:
        return isinstance(other, SurfacePresentation) and other.genus == self.genus

    def __hash__(self) -> int:
        return hash(("SurfacePresentation", self.genus))

    @property
    def alphabet(self) -> tuple[int, ...]:
        return tuple(sorted((s * x for x in range(1, 2 * self.genus + 1) for s in (1, -1)),
                            key=letter_rank))

    @property
    def generators(self) -> tuple[int, ...]:
        return tuple(range(1, 2 * self.genus + 1))

    @cached_property
    def relator(self) -> Word:
        letters = []
        for i in range(1, self.genus + 1):
            a, b = 2 * i - 1, 2 * i
            letters += [a, b, -a, -b]
        return Word(tuple(letters))

    def parse(self, text: str) -> Word:
        return parse_word(text, self.genus)

    @cached_property
    def _table(self) -> dict[int, dict[tuple[int, ...], tuple[int, ...]]]:
        # piece length -> {subword of a cyclic relator: inverse of the rest}.
        # Pieces one short of half lengthen the word by two; only the cyclic
        # closure uses them, to walk along chains of such pieces.
        n = 4 * self.genus
        table: dict[int, dict] = {k: {} for k in range(2 * self.genus - 1, n + 1)}
        for r in (self.relator.letters, invert(self.relator).letters):
            for i in range(n):
                rot = r[i:] + r[:i]
                for k in table:
                    table[k][rot[:k]] = tuple(-x for x in reversed(rot[k:]))
        return table

    # -- linear words --------------------------------------------------

    def _linear_moves(self, w: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        for k, table in self._table.items():
            if k < 2 * self.genus:
                continue
            for i in range(len(w) - k + 1):
                repl = table.get(w[i:i + k])
                if repl is not None:
                    yield _free_reduce(w[:i] + repl + w[i + k:])

    def _cyclic_moves(self, w: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        n = len(w)
        for k, table in self._table.items():
            if k > n:
                break
            for i in range(n):
                rot = w[i:] + w[:i]
                repl = table.get(rot[:k])
                if repl is not None:
                    yield _cyclically_reduce(repl + rot[k:])

    def _closure_min(self, start: tuple[int, ...], moves, normalize,
                     slack: int = 0) -> tuple[int, ...]:
        """Shortlex-least word reachable by relator moves.

        Moves are explored breadth first among words at most ``slack``
        letters longer than the current one; as soon as a move shortens the
        word the search restarts there.
        """
        current = normalize(start)
        while True:
            n = len(current)
            seen = {current}
            queue = deque([current])
            shorter = None
            while queue and shorter is None:
                w = queue.popleft()
                for nxt in moves(w):
                    nxt = normalize(nxt)
                    if len(nxt) < n:
                        shorter = nxt
                        break
                    if len(nxt) <= n + slack and nxt not in seen:
                        seen.add(nxt)
                        queue.append(nxt)
                if len(seen) > MAX_CLOSURE:
                    log.warning("relator closure of %s exceeded %d words",
                                format_word(current), MAX_CLOSURE)
                    break
            if shorter is None:
                return min((x for x in seen if len(x) == n), key=shortlex_key)
            current = shorter

    def dehn_reduce(self, w: Word) -> Word:
        w = as_word(w, self.genus)
        return Word(self._closure_min(_free_reduce(w.letters), self._linear_moves,
                                      lambda x: x))

    def shorten(self, w: Word) -> Word:
        """Greedy Dehn shortening: replace any piece of a cyclic relator longer
        than half of it by its shorter complement until none is left."""
        cur = _free_reduce(as_word(w, self.genus).letters)
        half = 2 * self.genus
        while cur:
            for k, table in self._table.items():
                if k <= half:
                    continue
                hit = next((i for i in range(len(cur) - k + 1) if cur[i:i + k] in table), None)
                if hit is not None:
                    cur = _free_reduce(cur[:hit] + table[cur[hit:hit + k]] + cur[hit + k:])
                    break
            else:
                break
        return Word(cur)

    def is_trivial(self, w: Word) -> bool:
        """Dehn's algorithm: a nontrivial reduced word always survives greedy
        shortening, since the relator has small cancellation."""
        return not self.shorten(w)

    def canonical(self, w: Word) -> CyclicWord:
        w = as_word(w, self.genus)
        core = _cyclically_reduce(w.letters)
        best = self._closure_min(core, self._cyclic_moves, min_rotation, slack=2)
        if not best:
            raise IdentityError(f"{format_word(w.letters) or '<empty>'} is the identity "
                                "- not a closed geodesic")
        return CyclicWord(best, canonical=True)

    def are_conjugate(self, u: Word, v: Word) -> bool:
        return self.canonical(u) == self.canonical(v)


def dehn_reduce(w: Word, p: SurfacePresentation) -> Word:
    return p.dehn_reduce(w)


def canonical_conjugacy_form(w: Word, p: SurfacePresentation) -> CyclicWord:
    return p.canonical(w)


def root_period(letters: Sequence[int]) -> int:
    """Smallest d such that the cyclic sequence is a d-periodic repetition."""
    n = len(letters)
    for d in range(1, n + 1):
        if n % d == 0 and all(letters[i] == letters[i % d] for i in range(n)):
            return d
    return n


def is_primitive(c: CyclicWord) -> bool:
    if not c.letters:
        raise IdentityError("the identity has no primitivity")
    return root_period(c.letters) == len(c.letters)


def random_word(genus: int, length: int, rng: random.Random) -> Word:
    """Uniform freely reduced word of exactly ``length`` letters."""
    gens = [x for i in range(1, 2 * genus + 1) for x in (i, -i)]
    letters: list[int] = []
    while len(letters) < length:
        x = rng.choice(gens)
        if letters and letters[-1] == -x:
            continue
        letters.append(x)
    return Word(tuple(letters))


def cyclically_reduced_words(genus: int, length: int) -> Iterator[tuple[int, ...]]:
    gens = [x for i in range(1, 2 * genus + 1) for x in (i, -i)]

    def extend(prefix):
        if len(prefix) == length:
            if prefix[0] != -prefix[-1]:
                yield tuple(prefix)
            return
        for x in gens:
            if not prefix or prefix[-1] != -x:
                prefix.append(x)
                yield from extend(prefix)
                prefix.pop()

    if length > 0:
        yield from extend([])


def classes_of_length(p: SurfacePresentation, n: int,
                      primitive_only: bool = True) -> list[CyclicWord]:
    """Canonical forms of the classes whose shortest representatives have
    exactly n letters, in shortlex order."""
    found: set[CyclicWord] = set()
    for letters in cyclically_reduced_words(p.genus, n):
        if letters != min_rotation(letters):
            continue
        try:
            c = p.canonical(Word(letters))
        except IdentityError:
            continue
        if len(c) == n and (not primitive_only or is_primitive(c)):
            found.add(c)
    return sorted(found, key=lambda c: shortlex_key(c.letters))


def conjugacy_classes(p: SurfacePresentation, max_length: int,
                      primitive_only: bool = True) -> list[CyclicWord]:
    """Canonical forms of every nontrivial class with a representative of
    length <= max_length, in shortlex order."""
    return [c for n in range(1, max_length + 1)
            for c in classes_of_length(p, n, primitive_only)]
