#!/usr/bin/env python3
"""Build the bundled default assets: layout.json, lexicon.tsv, ngrams.tsv,
phrases.txt.

Word frequencies come from the SUBTLEXus film-subtitle corpus as packaged by
the MIT-licensed `subtlex-word-frequencies` npm module.  Pass --source to
point at its index.json; without --source the script fetches the package
with `npm pack` into a temp directory.  Subtitle tokenization leaves
contraction fragments ("didn", "ll") and filler interjections at high ranks;
those are dropped, as are strong profanities (this lexicon feeds interactive
typing suggestions).  The generated files are committed, so rebuilding is
only needed to change the lexicon size or phrase set.

Usage: python scripts/build_default_data.py [--source index.json]
       [--out-dir src/gazeswipe/data] [--size 12000]
"""

from __future__ import annotations

import argparse
import json
import re
import subprocess
import sys
import tarfile
import tempfile
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from gazeswipe.geometry import build_qwerty_layout, save_layout  # noqa: E402

WORD_RE = re.compile(r"^[a-z]+$")
MAX_LEN = 14

# Contraction fragments and pure filler tokens that subtitle tokenization
# promotes to implausibly high ranks.
FRAGMENTS = {
    "re", "ll", "ve", "em", "don", "didn", "doesn", "isn", "wasn", "weren",
    "hasn", "hadn", "haven", "couldn", "wouldn", "shouldn", "mustn", "needn",
    "ain", "aren", "uh", "um", "hm", "hmm", "mm", "mmm", "huh", "heh", "ooh",
    "aah", "ahh", "whew", "psst", "shh", "ssh", "ya", "yo", "da", "na", "ta",
    "gon", "whatcha", "gotcha", "lemme", "gimme", "outta", "dunno", "kinda",
    "sorta", "cmon", "til", "er", "ere", "ow", "eh", "ag", "oy",
}

PROFANITY = {
    "fuck", "fucking", "fucked", "fucker", "fuckers", "motherfucker",
    "motherfuckers", "motherfucking", "shit", "shitty", "bullshit", "asshole",
    "assholes", "bitch", "bitches", "bastard", "bastards", "cunt", "dick",
    "dicks", "cock", "pussy", "whore", "whores", "slut", "nigger", "nigga",
    "faggot", "fag", "goddamn", "goddamned", "goddammit", "dammit", "tits",
    "piss", "pissed", "retard", "retarded",
}

# Everyday phrases for session fixtures, demo content, and bigram seeding.
PHRASES = [
    "how are you doing today",
    "what are you doing tonight",
    "what are you doing tomorrow",
    "see you tomorrow morning",
    "see you tonight after work",
    "i am on my way home",
    "thank you so much for your help",
    "can you call me back later",
    "the meeting starts in ten minutes",
    "i will be there in five minutes",
    "do you want to grab lunch",
    "the weather is really nice today",
    "have a great day at work",
    "what time does the movie start",
    "my phone battery is almost dead",
    "did you finish the report yet",
    "let me know when you get home",
    "the kids are already asleep",
    "we should plan a trip soon",
    "that restaurant was really good",
    "i forgot my keys at the office",
    "traffic is terrible this morning",
    "happy birthday to you",
    "i hope you feel better soon",
    "where did you park the car",
    "the game starts at seven",
    "please send me the address",
    "i am running a little late",
    "do you have any plans this weekend",
    "the coffee here is amazing",
    "my flight lands at noon",
    "can we talk about this later",
    "i just got out of the meeting",
    "the store closes in an hour",
    "what do you want for dinner",
    "i left my wallet at home",
    "the movie was better than the book",
    "are you free for a quick call",
    "my computer keeps crashing",
    "the printer is out of paper",
    "turn left at the next light",
    "the train leaves in twenty minutes",
    "i need to pick up the kids",
    "she got the job she wanted",
    "he is still at the gym",
    "we are out of milk again",
    "the food truck is here",
    "remember to water the plants",
    "i cannot find my glasses",
    "your package was delivered today",
    "the doctor can see you at three",
    "my battery died during the call",
    "i sent you the photos last night",
    "the elevator is broken again",
    "we won the game last night",
    "it might rain this afternoon",
    "bring a jacket just in case",
    "the keys are on the kitchen table",
    "i am almost done with work",
    "let us meet at the usual place",
    "the new place looks great",
    "i could not sleep last night",
    "the baby finally fell asleep",
    "are we still on for tonight",
    "i have a dentist appointment at two",
    "the internet is down at the office",
    "she said yes to the trip",
    "the bus was twenty minutes late",
    "there is cake in the kitchen",
    "i will take care of it",
    "the report is due on friday",
    "can you pick up some bread",
    "we need to leave in ten minutes",
    "the concert was sold out",
    "my sister is visiting next week",
    "the dog needs a walk",
    "i finished the book you gave me",
    "that was the best part of the day",
    "the meeting got moved to monday",
    "please water my plants this weekend",
    "the paint still looks wet",
    "i found your phone under the couch",
    "the heater stopped working last night",
    "our table is ready",
    "i got us tickets for saturday",
    "the road is closed for repairs",
    "lunch is on me today",
    "the teacher sent home a note",
    "my car is in the shop",
    "we ran out of coffee",
    "the package should arrive tomorrow",
    "i love what you did with the room",
    "this song always makes me smile",
    "the interview went really well",
    "do not forget your umbrella",
    "the cat knocked over the lamp",
    "dinner will be ready soon",
    "i paid the electric bill today",
    "they moved into the new house",
    "the pool opens next month",
    "my favorite show starts tonight",
    "the museum is free on sundays",
    "he fixed the leak in the sink",
    "the garden looks beautiful this year",
    "i signed us up for the class",
    "the mail came early today",
    "she made the team",
    "we watched the sunset from the roof",
    "the recipe calls for two eggs",
    "my brother landed a new job",
    "the library is open until nine",
    "i booked the flights this morning",
    "the knee feels much better now",
    "hold the elevator please",
    "the soup needs more salt",
    "they canceled the picnic because of rain",
    "i will call you when i get there",
    "the market was so crowded today",
    "our team hit the goal early",
    "the movie starts in fifteen minutes",
    "i picked up your dry cleaning",
    "the neighbors are having a party",
    "we planted tomatoes this spring",
    "the cable is in my bag",
    "i saved you a seat",
    "the test results came back fine",
    "he scored twice in the second half",
    "the bakery smells amazing",
    "i put gas in the car",
    "the meeting ran long again",
    "she speaks three languages",
    "the stars are out tonight",
    "i packed the boxes for the move",
    "the coach called an extra practice",
    "we are painting the bedroom blue",
    "the deadline got pushed a week",
    "i traded shifts with a friend",
    "the puppy chewed my shoe",
    "breakfast is the best meal of the day",
    "the ferry leaves on the hour",
    "i wrote up the notes",
    "the garage door is stuck",
    "we sold the old couch online",
    "the hike took about four hours",
    "i made reservations for eight",
    "the lights went out during the storm",
    "my old radio finally died",
    "the class was moved online",
    "we got matching costumes this year",
    "the juice is in the fridge",
    "i walked the dog before work",
    "the airport was surprisingly empty",
    "she passed the final exam",
    "the bridge is closed after dark",
    "i folded the laundry already",
    "the tickets sold out in minutes",
    "we tried that new place downtown",
    "the alarm never went off",
    "i reset the computer twice",
    "the soup of the day is tomato",
    "he ran his first marathon today",
    "the office is closed for the holiday",
]


def fetch_source(tmp: Path) -> Path:
    """Download the frequency package with npm and return index.json's path."""
    subprocess.run(
        ["npm", "pack", "subtlex-word-frequencies"],
        cwd=tmp, check=True, capture_output=True,
    )
    tarball = next(tmp.glob("subtlex-word-frequencies-*.tgz"))
    with tarfile.open(tarball) as tf:
        tf.extract("package/index.json", tmp)
    return tmp / "package" / "index.json"


def build_lexicon(source: Path, size: int) -> list[tuple[str, int]]:
    entries = json.loads(source.read_text())
    # The corpus is case-sensitive ("I", "How"); merge counts per lowercased form.
    merged: Counter = Counter()
    for e in entries:
        w = e["word"].lower()
        if not WORD_RE.fullmatch(w) or len(w) > MAX_LEN:
            continue
        if len(w) == 1 and w not in ("a", "i"):
            continue
        if w in FRAGMENTS or w in PROFANITY:
            continue
        merged[w] += int(e["count"])
    ranked = sorted(merged.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:size]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--source", type=Path, default=None, help="index.json with [{word, count}] entries")
    ap.add_argument("--out-dir", type=Path, default=Path(__file__).resolve().parents[1] / "src" / "gazeswipe" / "data")
    ap.add_argument("--size", type=int, default=12000)
    args = ap.parse_args()

    out_dir: Path = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.source:
        lexicon = build_lexicon(args.source, args.size)
    else:
        with tempfile.TemporaryDirectory() as tmp:
            lexicon = build_lexicon(fetch_source(Path(tmp)), args.size)
    if len(lexicon) < args.size:
        raise SystemExit(f"only {len(lexicon)} usable words in source, need {args.size}")

    vocab = {w for w, _ in lexicon}
    missing = sorted({w for p in PHRASES for w in p.split()} - vocab)
    if missing:
        raise SystemExit(f"phrase words missing from lexicon: {missing}")

    (out_dir / "lexicon.tsv").write_text("".join(f"{w}\t{c}\n" for w, c in lexicon))

    bigrams = Counter()
    for phrase in PHRASES:
        words = phrase.split()
        bigrams.update(zip(words, words[1:]))
    (out_dir / "ngrams.tsv").write_text(
        "".join(f"{a} {b}\t{n}\n" for (a, b), n in sorted(bigrams.items()))
    )

    (out_dir / "phrases.txt").write_text("".join(p + "\n" for p in PHRASES))
    save_layout(build_qwerty_layout(), out_dir / "layout.json")
    print(f"wrote {len(lexicon)} words, {len(bigrams)} bigrams, {len(PHRASES)} phrases -> {out_dir}")


if __name__ == "__main__":
    main()
