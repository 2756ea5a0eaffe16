#!/usr/bin/env python3
"""Regenerates the small synthetic corpus used by the CLI tests.

Run from this directory: python3 generate.py
"""
import csv
import json
import math
import random

rng = random.Random(20240611)

JUSTICES = ["adair", "baylor", "castell", "dunmore", "ellery", "fenwick", "garrow", "hollis"]
# First four track public mood; the rest drift independently.
RESPONSIVE = set(JUSTICES[:4])
LEANING = {j: (1 if i % 2 == 0 else -1) for i, j in enumerate(JUSTICES)}
YEARS = list(range(2005, 2017))
CASES_PER_YEAR = 8

TOPICS = [
    ("the search of a vehicle without a warrant", "violated the Fourth Amendment"),
    ("a state tax on out-of-state sellers", "burdened interstate commerce"),
    ("the dismissal of a whistleblower", "breached federal employment protections"),
    ("an agency rule on emissions", "exceeded statutory authority"),
    ("a sentencing enhancement", "required a jury finding"),
    ("a class arbitration waiver", "was enforceable"),
    ("a congressional district map", "diluted minority votes"),
    ("a union fee requirement", "compelled speech"),
    ("a patent on a diagnostic method", "claimed a law of nature"),
    ("a warrantless phone search", "was reasonable incident to arrest"),
]
PRO_WORDS = ["affirm", "protect", "guarantee", "remedy", "uphold", "safeguard", "secure", "vindicate"]
CON_WORDS = ["reject", "deny", "foreclose", "overturn", "limit", "restrict", "bar", "withhold"]
FILLER = ["the", "court", "record", "statute", "petitioner", "respondent", "holding", "text",
          "history", "precedent", "question", "argument", "judgment", "below", "claim", "rule"]
ENTITIES = ["Justice Adair", "October 10", "42 U.S.C. 1983", "Smith v. Jones", "March 3",
            "Chief Justice Baylor", "28 U.S.C. 1291", "Ohio v. Reed"]

EMOTION = {
    "fear": ["danger", "threat", "afraid", "risk"],
    "anger": ["outrage", "unfair", "hostile", "abuse"],
    "trust": ["faith", "honest", "reliable", "loyal"],
    "joy": ["hope", "pleased", "welcome", "relief"],
}
NEUTRAL_WORDS = ["table", "window", "number", "paper", "minute", "page"]
LIBERAL_CUES = ["equality", "workers", "rights", "fairness", "access", "voters"]
CONSERVATIVE_CUES = ["liberty", "tradition", "markets", "order", "federalism", "property"]


def sentence(words, n):
    return " ".join(rng.choice(words) for _ in range(n))


def opinion_text(label, question, noise=0.3):
    cues = PRO_WORDS if label == "pro" else CON_WORDS
    other = CON_WORDS if label == "pro" else PRO_WORDS
    mixed = [rng.choice(other if rng.random() < noise else cues) for _ in range(5)]
    parts = [sentence(FILLER, 6), " ".join(mixed[:3]), sentence(FILLER, 5), rng.choice(ENTITIES),
             " ".join(mixed[3:]), sentence(FILLER, 4), question.split()[-2]]
    rng.shuffle(parts)
    return " ".join(parts) + "."


def ideology_text(side, noise=0.2):
    cues = CONSERVATIVE_CUES if side > 0 else LIBERAL_CUES
    other = LIBERAL_CUES if side > 0 else CONSERVATIVE_CUES
    words = [rng.choice(other if rng.random() < noise else cues) for _ in range(4)]
    return " ".join(words + [sentence(FILLER, 4)])


def stance_of(winner, op_type):
    disposition = "pro" if winner == "petitioner" else "con"
    if op_type == "dissenting":
        return "con" if disposition == "pro" else "pro"
    return disposition


def write_jsonl(path, rows):
    with open(path, "w") as f:
        for r in rows:
            f.write(json.dumps(r, sort_keys=False) + "\n")


def main():
    cases, opinions, statements, salience_rows = [], [], [], []
    for year in YEARS:
        for k in range(CASES_PER_YEAR):
            case_id = f"{year}-{k + 1:03d}"
            subject, claim = rng.choice(TOPICS)
            question = f"Whether {subject} {claim} ?"
            winner = rng.choices(["petitioner", "respondent", "unclear"], [0.55, 0.4, 0.05])[0]
            has_question = rng.random() > 0.05
            salience = round(rng.uniform(0.0, 1.0), 4)
            cases.append({
                "case_id": case_id,
                "winning_party": winner,
                "legal_question": question if has_question else None,
                "salience": salience,
            })
            salience_rows.append({"case_id": case_id, "term": year, "salience": salience})

            if rng.random() < 0.05:
                types = ["per_curiam"]
            else:
                types = ["majority"] + ["concurring"] * (rng.random() < 0.3) + ["dissenting"] * (rng.random() < 0.6)
            for t in types:
                author = rng.choice(JUSTICES)
                label = stance_of(winner if winner != "unclear" else "petitioner", t)
                text = opinion_text(label, question)
                # Politically salient cases read more ideologically.
                text += " " + ideology_text(LEANING[author] if salience > 0.5 else rng.choice([-1, 1]))
                opinions.append({
                    "case_id": case_id, "year": year, "author_id": author,
                    "opinion_type": t, "text": text,
                })

            for j in JUSTICES:
                for _ in range(rng.randint(2, 5)):
                    emo = rng.choice(list(EMOTION))
                    words = [rng.choice(EMOTION[emo])] if rng.random() < 0.75 else [rng.choice(NEUTRAL_WORDS)]
                    words += ideology_text(LEANING[j], noise=0.3).split()
                    rng.shuffle(words)
                    statements.append({
                        "case_id": case_id, "year": year, "speaker_id": j,
                        "speaker_role": "justice", "text": " ".join(words),
                    })
            for _ in range(3):
                statements.append({
                    "case_id": case_id, "year": year, "speaker_id": "counsel",
                    "speaker_role": "advocate", "text": "danger " + sentence(FILLER, 6),
                })
    # One malformed line: ingest must report it rather than abort.
    write_jsonl("transcripts.jsonl", statements)
    with open("transcripts.jsonl", "a") as f:
        f.write('{"case_id": "2010-001", "year": 1900, "speaker_id": "adair", "speaker_role": "justice", "text": "too early"}\n')
    write_jsonl("opinions.jsonl", opinions)
    write_jsonl("cases.jsonl", cases)

    with open("lexicon.tsv", "w") as f:
        for emo, words in sorted(EMOTION.items()):
            for w in words:
                for e in sorted(EMOTION):
                    f.write(f"{w}\t{e}\t{1 if e == emo else 0}\n")
        for w in NEUTRAL_WORDS:
            f.write(f"{w}\tjoy\t0\n")

    with open("targets.toml", "w") as f:
        f.write('liberal = [\n  "Workers deserve equal access to the courts",\n  "Voting rights must be protected",\n]\n')
        f.write('conservative = [\n  "Property and liberty limit government",\n  "Tradition and federalism guide the law",\n]\n')

    mood = {}
    level = 60.0
    for y in YEARS:
        level += rng.gauss(0, 2.5)
        mood[y] = round(level, 3)
    with open("mood.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["year", "mood"])
        for y in YEARS:
            w.writerow([y, mood[y]])

    mean_mood = sum(mood.values()) / len(mood)
    with open("mq.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["justiceName", "term", "post_mn"])
        for j in JUSTICES:
            base = LEANING[j] * 1.2
            for y in YEARS:
                if j in RESPONSIVE:
                    v = base - 0.08 * (mood[y] - mean_mood) + rng.gauss(0, 0.03)
                else:
                    v = base + rng.gauss(0, 0.15)
                w.writerow([j, y, round(v, 4)])

    with open("salience.csv", "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=["case_id", "term", "salience"])
        w.writeheader()
        w.writerows(salience_rows)

    ideology = []
    for i in range(200):
        side = 1 if i % 2 == 0 else -1
        ideology.append({"text": ideology_text(side, noise=0.1),
                         "label": "conservative" if side > 0 else "liberal"})
    write_jsonl("ideology_train.jsonl", ideology)


if __name__ == "__main__":
    main()
