"""Word lexicon with frequencies and prefix trie; word and character n-grams.

File formats: lexicon.tsv is "word<TAB>count" lines, ngrams.tsv is
"w1 w2<TAB>count" lines.  All models are immutable after build and shareable
read-only; probabilities use add-k smoothing over the lexicon vocabulary so
conditionals sum to exactly one.
"""

from __future__ import annotations

import re
from collections import Counter, defaultdict
from pathlib import Path

import numpy as np

LETTERS = "abcdefghijklmnopqrstuvwxyz"
_WORD_RE = re.compile(r"^[a-z]+$")
BOUNDARY = "^"


class LexiconError(ValueError):
    pass


class TrieNode(dict):
    __slots__ = ("terminal",)

    def __init__(self):
        super().__init__()
        self.terminal = False


class Trie:
    def __init__(self):
        self.root = TrieNode()
        self.size = 0

    def insert(self, word: str) -> None:
        node = self.root
        for ch in word:
            node = node.setdefault(ch, TrieNode())
        if not node.terminal:
            node.terminal = True
            self.size += 1

    def __contains__(self, word: str) -> bool:
        node = self.root
        for ch in word:
            node = node.get(ch)
            if node is None:
                return False
        return node.terminal

    def words_with_prefix(self, prefix: str) -> list[str]:
        node = self.root
        for ch in prefix:
            node = node.get(ch)
            if node is None:
                return []
        out: list[str] = []
        stack = [(node, prefix)]
        while stack:
            n, acc = stack.pop()
            if n.terminal:
                out.append(acc)
            for ch, child in n.items():
                stack.append((child, acc + ch))
        return sorted(out)


class Lexicon:
    """word -> count map plus a prefix trie over exactly the entry set."""

    def __init__(self, entries: dict[str, int]):
        for w, c in entries.items():
            if not _WORD_RE.match(w):
                raise LexiconError(f"word {w!r} is not lowercase a-z")
            if c < 1:
                raise LexiconError(f"count for {w!r} must be >= 1")
        self.entries = dict(entries)
        self.total = sum(self.entries.values())
        self.trie = Trie()
        for w in self.entries:
            self.trie.insert(w)
        self._by_first: dict[str, list[str]] = defaultdict(list)
        for w in sorted(self.entries):
            self._by_first[w[0]].append(w)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def words(self) -> list[str]:
        return sorted(self.entries)

    def count(self, word: str) -> int:
        return self.entries.get(word, 0)

    def words_starting_with(self, letter: str) -> list[str]:
        return self._by_first.get(letter, [])

    @classmethod
    def from_tsv(cls, path: str | Path) -> "Lexicon":
        entries: dict[str, int] = {}
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                try:
                    word, count = line.split("\t")
                    entries[word] = entries.get(word, 0) + int(count)
                except ValueError:
                    raise LexiconError(f"{path}:{lineno}: bad lexicon line {line!r}") from None
        return cls(entries)

    def to_tsv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for w, c in sorted(self.entries.items(), key=lambda kv: (-kv[1], kv[0])):
                f.write(f"{w}\t{c}\n")

    @classmethod
    def from_corpus(cls, lines: list[str]) -> "Lexicon":
        counts = Counter(w for line in lines for w in tokenize(line))
        return cls(dict(counts))


def tokenize(text: str) -> list[str]:
    """Lowercase and strip to a-z words (apostrophes and casing dropped)."""
    return re.findall(r"[a-z]+", text.lower().replace("'", ""))


class WordNgramModel:
    """Bigram-with-unigram-backoff word model, add-k smoothed over the lexicon."""

    def __init__(self, lexicon: Lexicon, bigrams: dict[tuple[str, str], int] | None = None, k: float = 0.1):
        if k < 0:
            raise LexiconError("smoothing k must be >= 0")
        self.order = 2
        self.k = k
        self.lexicon = lexicon
        self.vocab_size = len(lexicon)
        self._bigram: dict[str, dict[str, int]] = defaultdict(dict)
        self._row_total: dict[str, int] = {}
        for (w1, w2), c in (bigrams or {}).items():
            if w1 in lexicon and w2 in lexicon:
                self._bigram[w1][w2] = self._bigram[w1].get(w2, 0) + c
        for w1, row in self._bigram.items():
            self._row_total[w1] = sum(row.values())

    @classmethod
    def from_corpus(cls, lines: list[str], lexicon: Lexicon | None = None, k: float = 0.1) -> "WordNgramModel":
        toks = [tokenize(line) for line in lines]
        if lexicon is None:
            lexicon = Lexicon(dict(Counter(w for ws in toks for w in ws)))
        bigrams: Counter = Counter()
        for ws in toks:
            for a, b in zip(ws, ws[1:]):
                bigrams[(a, b)] += 1
        return cls(lexicon, dict(bigrams), k=k)

    @classmethod
    def uniform(cls, lexicon: Lexicon, k: float = 0.1) -> "WordNgramModel":
        uni = Lexicon({w: 1 for w in lexicon.entries})
        return cls(uni, {}, k=k)

    @classmethod
    def load_bigrams(cls, lexicon: Lexicon, path: str | Path, k: float = 0.1) -> "WordNgramModel":
        bigrams: dict[tuple[str, str], int] = {}
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                try:
                    pair, count = line.split("\t")
                    w1, w2 = pair.split(" ")
                    bigrams[(w1, w2)] = bigrams.get((w1, w2), 0) + int(count)
                except ValueError:
                    raise LexiconError(f"{path}:{lineno}: bad ngram line {line!r}") from None
        return cls(lexicon, bigrams, k=k)

    def p_word(self, word: str, context_words: list[str] | tuple[str, ...] = ()) -> float:
        """Smoothed p(word | last context word); unigram when context is empty.

        Out-of-lexicon words get the smoothing floor rather than an error.
        """
        prev = context_words[-1] if context_words else None
        if prev is not None and prev in self._row_total:
            row = self._bigram[prev]
            num = row.get(word, 0) + self.k
            den = self._row_total[prev] + self.k * self.vocab_size
        else:
            num = self.lexicon.count(word) + self.k
            den = self.lexicon.total + self.k * self.vocab_size
        if den == 0:
            return 0.0
        return num / den

    def p_words(self, words: list[str], context_words: list[str] | tuple[str, ...] = ()) -> np.ndarray:
        """Vectorized p_word over a candidate list."""
        prev = context_words[-1] if context_words else None
        if prev is not None and prev in self._row_total:
            row = self._bigram[prev]
            den = self._row_total[prev] + self.k * self.vocab_size
            counts = np.array([row.get(w, 0) for w in words], dtype=float)
        else:
            den = self.lexicon.total + self.k * self.vocab_size
            counts = np.array([self.lexicon.count(w) for w in words], dtype=float)
        if den == 0:
            return np.zeros(len(words))
        return (counts + self.k) / den


def prefix_shortlist(
    lexicon: Lexicon, model: WordNgramModel, context_words: list[str], k: int
) -> list[str]:
    """The k lexicon words most probable under the context (ties alphabetical)."""
    if k < 1:
        raise LexiconError("k must be >= 1")
    scored = sorted(lexicon.entries, key=lambda w: (-model.p_word(w, context_words), w))
    return scored[:k]


class CharNgramModel:
    """Character bigram over a-z with a boundary symbol for word starts."""

    def __init__(self, counts: dict[tuple[str, str], int] | None = None, k: float = 0.1):
        if k < 0:
            raise LexiconError("smoothing k must be >= 0")
        self.k = k
        self._counts: dict[str, dict[str, int]] = defaultdict(lambda: defaultdict(int))
        for (prev, ch), c in (counts or {}).items():
            if ch in LETTERS and (prev in LETTERS or prev == BOUNDARY):
                self._counts[prev][ch] += c
        self._row_total = {p: sum(row.values()) for p, row in self._counts.items()}

    @classmethod
    def from_words(cls, weighted_words: dict[str, int], k: float = 0.1) -> "CharNgramModel":
        counts: Counter = Counter()
        for word, weight in weighted_words.items():
            prev = BOUNDARY
            for ch in word:
                counts[(prev, ch)] += weight
                prev = ch
        return cls(dict(counts), k=k)

    @classmethod
    def from_corpus(cls, lines: list[str], k: float = 0.1) -> "CharNgramModel":
        return cls.from_words(dict(Counter(w for line in lines for w in tokenize(line))), k=k)

    def p_char(self, letter: str, prefix: str = "") -> float:
        """Smoothed p(letter | last char of prefix); boundary for empty prefix."""
        if len(letter) != 1 or letter not in LETTERS:
            raise LexiconError(f"letter {letter!r} not in a-z")
        prev = prefix[-1] if prefix else BOUNDARY
        if prev not in LETTERS and prev != BOUNDARY:
            prev = BOUNDARY
        row = self._counts.get(prev, {})
        total = self._row_total.get(prev, 0)
        num = row.get(letter, 0) + self.k
        den = total + self.k * len(LETTERS)
        if den == 0:
            return 1.0 / len(LETTERS)
        return num / den
