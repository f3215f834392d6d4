"""Pluggable stemmers.

Ships two stemmers: ``en-suffix``, the classic five-step English suffix
stripper, and ``identity``.  Language-specific lemmatizers can be added
through :func:`register_stemmer`.
"""

from __future__ import annotations

from typing import Callable

Stemmer = Callable[[str], str]


class _EnglishSuffixStemmer:
    """Rule-based English suffix stripping.

    Works on an internal buffer ``b`` with ``k`` marking the end of the
    current word and ``j`` the end of the candidate stem, mirroring the
    classic reference formulation so outputs match it exactly.
    """

    def __init__(self):
        self.b = ""
        self.k = 0
        self.j = 0

    def _cons(self, i: int) -> bool:
        ch = self.b[i]
        if ch in "aeiou":
            return False
        if ch == "y":
            return True if i == 0 else not self._cons(i - 1)
        return True

    def _m(self) -> int:
        """Number of vowel-consonant sequences in b[0..j]."""
        n = 0
        i = 0
        while True:
            if i > self.j:
                return n
            if not self._cons(i):
                break
            i += 1
        i += 1
        while True:
            while True:
                if i > self.j:
                    return n
                if self._cons(i):
                    break
                i += 1
            i += 1
            n += 1
            while True:
                if i > self.j:
                    return n
                if not self._cons(i):
                    break
                i += 1
            i += 1

    def _vowel_in_stem(self) -> bool:
        return any(not self._cons(i) for i in range(self.j + 1))

    def _doublec(self, j: int) -> bool:
        if j < 1:
            return False
        if self.b[j] != self.b[j - 1]:
            return False
        return self._cons(j)

    def _cvc(self, i: int) -> bool:
        if i < 2 or not self._cons(i) or self._cons(i - 1) or not self._cons(i - 2):
            return False
        return self.b[i] not in "wxy"

    def _ends(self, s: str) -> bool:
        length = len(s)
        if s[-1] != self.b[self.k]:
            return False
        if length > self.k + 1:
            return False
        if self.b[self.k - length + 1 : self.k + 1] != s:
            return False
        self.j = self.k - length
        return True

    def _setto(self, s: str) -> None:
        self.b = self.b[: self.j + 1] + s + self.b[self.j + len(s) + 1 :]
        self.k = self.j + len(s)

    def _r(self, s: str) -> None:
        if self._m() > 0:
            self._setto(s)

    def _step1ab(self) -> None:
        # plurals and -ed / -ing
        if self.b[self.k] == "s":
            if self._ends("sses"):
                self.k -= 2
            elif self._ends("ies"):
                self._setto("i")
            elif self.b[self.k - 1] != "s":
                self.k -= 1
        if self._ends("eed"):
            if self._m() > 0:
                self.k -= 1
        elif (self._ends("ed") or self._ends("ing")) and self._vowel_in_stem():
            self.k = self.j
            if self._ends("at"):
                self._setto("ate")
            elif self._ends("bl"):
                self._setto("ble")
            elif self._ends("iz"):
                self._setto("ize")
            elif self._doublec(self.k):
                self.k -= 1
                if self.b[self.k] in "lsz":
                    self.k += 1
            elif self._m() == 1 and self._cvc(self.k):
                self._setto("e")

    def _step1c(self) -> None:
        # terminal y -> i when the stem contains a vowel
        if self._ends("y") and self._vowel_in_stem():
            self.b = self.b[: self.k] + "i" + self.b[self.k + 1 :]

    _STEP2 = (
        ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
        ("izer", "ize"), ("bli", "ble"), ("alli", "al"), ("entli", "ent"),
        ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
        ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
        ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
        ("logi", "log"),
    )

    _STEP3 = (
        ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
        ("ical", "ic"), ("ful", ""), ("ness", ""),
    )

    def _map_suffix(self, table) -> None:
        for suffix, repl in table:
            if self._ends(suffix):
                self._r(repl)
                return

    _STEP4 = (
        "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
        "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
    )

    def _step4(self) -> None:
        # strip derivational suffixes from longer stems
        for suffix in self._STEP4:
            if self._ends(suffix):
                if suffix == "ion" and self.b[self.j] not in "st":
                    continue
                if self._m() > 1:
                    self.k = self.j
                return

    def _step5(self) -> None:
        # tidy up trailing -e and double l
        self.j = self.k
        if self.b[self.k] == "e":
            a = self._m()
            if a > 1 or (a == 1 and not self._cvc(self.k - 1)):
                self.k -= 1
        if self.b[self.k] == "l" and self._doublec(self.k) and self._m() > 1:
            self.k -= 1

    def stem(self, word: str) -> str:
        if len(word) <= 2:
            return word
        self.b = word
        self.k = len(word) - 1
        self.j = 0
        self._step1ab()
        self._step1c()
        self._map_suffix(self._STEP2)
        self._map_suffix(self._STEP3)
        self._step4()
        self._step5()
        return self.b[: self.k + 1]


def english_suffix_stem(word: str) -> str:
    """Stem one lowercase word with the five-step English suffix rules."""
    return _EnglishSuffixStemmer().stem(word)


_REGISTRY: dict[str, Stemmer] = {
    "en-suffix": english_suffix_stem,
    "identity": lambda word: word,
}


def register_stemmer(name: str, fn: Stemmer) -> None:
    _REGISTRY[name] = fn


def get_stemmer(name: str) -> Stemmer:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown stemmer: {name!r} (available: {sorted(_REGISTRY)})") from None


def available_stemmers() -> list[str]:
    return sorted(_REGISTRY)
