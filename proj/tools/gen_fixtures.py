#!/usr/bin/env python3
# Copyright 2026 The Praisetag Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the synthetic fixture corpora under data/.

All texts are synthetic. The corpora only mirror published aggregate
counts (label combinations, BIO tag totals); no real tutor response is
included.

    python3 tools/gen_fixtures.py data/
"""

import json
import random
import string
import sys
from pathlib import Path

PUNCT = set(string.punctuation)

# Response-level praise combinations of the reference lesson data.
GROUPS = {"effort": 52, "both": 29, "outcome": 26, "neither": 22}

# BIO tag totals of the reference NER annotation.
DIST_TAG_COUNTS = {"O": 2380, "B-Outcome": 53, "I-Outcome": 114, "B-Effort": 80, "I-Effort": 484}
DIST_RESPONSES = 129

EFFORT_PHRASES = [
    "you stuck with it",
    "you worked hard on this problem",
    "you kept working through every step",
    "I like how you worked hard to finish",
    "you never gave up on that question",
    "you tried a different strategy when you got stuck",
    "you kept trying even when it got hard",
    "your effort on the fractions really showed",
    "I noticed you checked your work carefully",
    "you were working through this one step at a time",
    "you did not give up",
    "you kept at it",
]

OUTCOME_PHRASES = [
    "Good job",
    "Great job",
    "Nice job",
    "Well done",
    "you got the right answer",
    "you did well on the quiz",
    "that answer is perfect",
    "you are doing great so far",
]

FILLERS = [
    "Let's look at the next question.",
    "I am glad you asked for help today.",
    "We can do this homework together.",
    "Take a breath before the next one.",
    "Show me how you set up the problem.",
    "Let's work together.",
    "Read the question one more time.",
    "What do you think comes next?",
    "Tell me about your plan.",
]

# Word bank for exact-length filler; contains no lexicon phrase.
FLEX_WORDS = ("remember to check each step before moving on to the next part of "
              "the worksheet and write down what you notice about the numbers").split()


def tokenize(text):
    """Mirror of the C++ tokenizer for ASCII text."""
    tokens = []
    for chunk in text.split():
        lo, hi = 0, len(chunk)
        while lo < hi and chunk[lo] in PUNCT:
            tokens.append(chunk[lo])
            lo += 1
        while hi > lo and chunk[hi - 1] in PUNCT:
            hi -= 1
        if lo < hi:
            tokens.append(chunk[lo:hi])
            tokens.extend(chunk[hi:])
    return tokens


class Builder:
    """Accumulates tokens with labels, then renders text and spans."""

    def __init__(self):
        self.tokens = []  # (word, label or None, begins_span)

    def add_words(self, words, label=None):
        for k, w in enumerate(words):
            self.tokens.append((w, label, label is not None and k == 0))

    def add_sentence(self, sentence):
        self.add_words(tokenize(sentence))

    def render(self):
        text = ""
        for word, _, _ in self.tokens:
            if text and not (len(word) == 1 and word in PUNCT):
                text += " "
            text += word
        spans = []
        for i, (_, label, begins) in enumerate(self.tokens):
            if begins:
                spans.append({"label": label, "token_start": i, "token_end": i + 1})
            elif label is not None:
                spans[-1]["token_end"] = i + 1
        assert tokenize(text) == [t[0] for t in self.tokens], text
        return text, spans

    def o_count(self):
        return sum(1 for _, label, _ in self.tokens if label is None)


def capitalize(words):
    return [words[0][0].upper() + words[0][1:]] + words[1:]


def praise_corpus(rng):
    plan = []
    for group, n in GROUPS.items():
        plan.extend([group] * n)
    rng.shuffle(plan)
    lines = []
    for idx, group in enumerate(plan, start=1):
        b = Builder()
        parts = []
        if group in ("outcome", "both"):
            parts.append(("Outcome", rng.choice(OUTCOME_PHRASES)))
        if group in ("effort", "both"):
            parts.append(("Effort", rng.choice(EFFORT_PHRASES)))
        if rng.random() < 0.5 or not parts:
            parts.append((None, rng.choice(FILLERS)))
        if group == "neither" and rng.random() < 0.5:
            parts.append((None, rng.choice(FILLERS)))
        rng.shuffle(parts)
        for label, phrase in parts:
            if label is None:
                b.add_sentence(phrase)
            else:
                words = capitalize(phrase.split())
                b.add_words(words, label)
                b.add_words([rng.choice(["!", "."])])
        text, spans = b.render()
        lines.append({
            "id": f"praise-{idx:03d}",
            "text": text,
            "spans": spans,
            "meta": {"group": group, "lesson": "giving-effective-praise", "synthetic": "true"},
        })
    return lines


def lengths_with_sum(rng, count, total, lo, hi):
    base = total // count
    out = [base] * count
    for k in range(total - base * count):
        out[k] += 1
    for _ in range(count * 4):
        i, j = rng.randrange(count), rng.randrange(count)
        if i != j and out[i] < hi and out[j] > lo:
            out[i] += 1
            out[j] -= 1
    rng.shuffle(out)
    assert sum(out) == total and min(out) >= lo and max(out) <= hi
    return out


def phrase_of_length(rng, pool, length):
    """A phrase with exactly `length` words, trimmed or extended as needed."""
    candidates = [p.split() for p in pool if len(p.split()) >= length]
    if candidates:
        return rng.choice(candidates)[:length]
    words = rng.choice(pool).split()
    extra = "on this assignment today and yesterday too".split()
    return (words + extra)[:length]


def tag_distribution_corpus(rng):
    n_out = DIST_TAG_COUNTS["B-Outcome"]
    n_eff = DIST_TAG_COUNTS["B-Effort"]
    out_lengths = lengths_with_sum(rng, n_out, n_out + DIST_TAG_COUNTS["I-Outcome"], 2, 5)
    eff_lengths = lengths_with_sum(rng, n_eff, n_eff + DIST_TAG_COUNTS["I-Effort"], 4, 10)

    slots = [[] for _ in range(DIST_RESPONSES)]
    for k, length in enumerate(eff_lengths):
        slots[k % DIST_RESPONSES].append(("Effort", length))
    order = list(range(DIST_RESPONSES))
    rng.shuffle(order)
    for k, length in enumerate(out_lengths):
        slots[order[k % DIST_RESPONSES]].append(("Outcome", length))

    o_targets = [DIST_TAG_COUNTS["O"] // DIST_RESPONSES] * DIST_RESPONSES
    for k in range(DIST_TAG_COUNTS["O"] - sum(o_targets)):
        o_targets[k] += 1

    lines = []
    for idx in range(DIST_RESPONSES):
        b = Builder()
        rng.shuffle(slots[idx])
        for label, length in slots[idx]:
            pool = EFFORT_PHRASES if label == "Effort" else OUTCOME_PHRASES
            b.add_words(capitalize(phrase_of_length(rng, pool, length)), label)
            b.add_words(["."])
        fillers = FILLERS[:]
        rng.shuffle(fillers)
        for sentence in fillers:
            if b.o_count() + len(tokenize(sentence)) + 2 > o_targets[idx]:
                break
            b.add_sentence(sentence)
        need = o_targets[idx] - b.o_count()
        assert need >= 0
        if need == 1:
            b.add_words(["Okay"])
        elif need >= 2:
            b.add_words(capitalize(FLEX_WORDS[: need - 1]) + ["."])
        text, spans = b.render()
        lines.append({
            "id": f"dist-{idx + 1:03d}",
            "text": text,
            "spans": spans,
            "meta": {"synthetic": "true"},
        })
    return lines


def case_study_corpus():
    cases = [
        ("case-1", "Good job working through this and trying some different approaches.",
         [("Effort", "Good job working through this")],
         [("Effort", "Good job working through this")]),
        ("case-2", "Try your best to focus on the next step, you're already doing great so far.",
         [("Outcome", "doing great so far")],
         []),
        ("case-3", "You did it, you did well, you got the right answer and you stuck with it, "
                   "I'm proud of what you have done. Good job.",
         [("Outcome", "you got the right answer"), ("Effort", "you stuck with it"),
          ("Outcome", "Good job")],
         [("Outcome", "did well"), ("Effort", "you stuck with it"),
          ("Effort", "I'm proud of what you have done"), ("Outcome", "Good job")]),
        ("case-4", "I am glad you asked for help today. We can do this homework together.",
         [], []),
    ]

    def locate(tokens, phrase, used):
        words = tokenize(phrase)
        for start in range(len(tokens) - len(words) + 1):
            if tokens[start:start + len(words)] == words and start not in used:
                used.add(start)
                return start, start + len(words)
        raise ValueError(phrase)

    gold, pred = [], []
    for case_id, text, gold_spans, pred_spans in cases:
        tokens = tokenize(text)
        used = set()
        spans = []
        for label, phrase in gold_spans:
            s, e = locate(tokens, phrase, used)
            spans.append({"label": label, "token_start": s, "token_end": e})
        spans.sort(key=lambda x: x["token_start"])
        gold.append({"id": case_id, "text": text, "spans": spans, "meta": {"source": "case-study"}})
        used = set()
        spans = []
        for label, phrase in pred_spans:
            s, e = locate(tokens, phrase, used)
            spans.append({"label": label, "token_start": s, "token_end": e, "confidence": 0.9})
        spans.sort(key=lambda x: x["token_start"])
        pred.append({"response_id": case_id, "tagger_id": "case-study", "latency_ms": 0, "spans": spans})
    return gold, pred


def dump(path, records):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False, separators=(",", ":")) + "\n")


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "data")
    out.mkdir(parents=True, exist_ok=True)
    dump(out / "praise_fixture.jsonl", praise_corpus(random.Random(20230701)))
    dump(out / "tag_distribution_fixture.jsonl", tag_distribution_corpus(random.Random(3111)))
    gold, pred = case_study_corpus()
    dump(out / "case_study_gold.jsonl", gold)
    dump(out / "case_study_pred.jsonl", pred)


if __name__ == "__main__":
    main()
