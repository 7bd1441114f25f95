"""Regenerate the bundled synthetic fixture under src/sentinel/data/fixture/.

500 rows survive harmonization (250 per class) spread over the six source
layouts, plus discarded, malformed and non-English rows. Suicidal and
non-suicidal posts draw their topic words from disjoint vocabularies.

    python scripts/make_fixture.py
"""

import csv
import random
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "sentinel" / "data" / "fixture"

SUICIDAL_WORDS = """die dying suicide kill overdose hopeless worthless goodbye pills noose
razor despair trapped burden unbearable numb funeral grave hanging jump bridge empty
hurting agony suffocating drowning meaningless lifeless""".split()
NEUTRAL_WORDS = """game pizza coffee football movie guitar beach recipe puppy homework
concert garden bicycle sandwich basketball painting vacation birthday camera kitten
festival podcast pancake volleyball hiking museum skateboard""".split()
FILLER = """today really feel people time know think friend day thing week night morning
work school talk always everything someone family tonight""".split()

SUICIDAL_FRAMES = [
    "I can't stop thinking about {a} and {b}",
    "Everything feels {a} and I keep thinking about {b}",
    "Tonight the {a} is {b} and I want it over",
    "I wrote a note about {a} because of the {b}",
    "Nobody sees the {a}, only {b} left",
]
NEUTRAL_FRAMES = [
    "Just got back from the {a} with a {b}!!",
    "Anyone want to talk about {a} or {b}?",
    "My {a} was sooooo good, then {b} all afternoon",
    "Check out this {a} https://example.com/{b} 10/10",
    "Can't wait for the {a} and the {b} this weekend",
]


def post(rng, suicidal, n_sentences=None):
    words = SUICIDAL_WORDS if suicidal else NEUTRAL_WORDS
    frames = SUICIDAL_FRAMES if suicidal else NEUTRAL_FRAMES
    out = []
    for _ in range(n_sentences or rng.randint(1, 3)):
        s = rng.choice(frames).format(a=rng.choice(words), b=rng.choice(words))
        s += " " + " ".join(rng.sample(FILLER, rng.randint(1, 4)))
        out.append(s + rng.choice([".", ".", "!", "?"]))
    text = " ".join(out)
    if rng.random() < 0.1:
        text = text.replace("e", "é", 1)
    return text


def long_post(rng, suicidal, target_words):
    text = ""
    while len(text.split()) < target_words:
        text += " " + post(rng, suicidal, 1)
    return " ".join(text.split()[:target_words]).rstrip(".!?") + "."


def write(name, header, rows):
    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / name, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def main(seed=7):
    rng = random.Random(seed)

    rows = []
    labels = ["Attempt", "Ideation"] * 15 + ["Supportive", "Behavior", "Indicator"] * 10
    rng.shuffle(labels)
    for i, lab in enumerate(labels):
        rows.append([f"user-{i}", str([post(rng, lab in ("Attempt", "Ideation"))]), lab])
    write("tda.csv", ["User", "Post", "Label"], rows)

    rows = []
    flags = [0] * 45 + [1] * 55
    rng.shuffle(flags)
    for i, f in enumerate(flags):
        rows.append([i, post(rng, f == 0), f, rng.choice([0, 1, 3])])
    # long suicidal posts exercise the summarizer; the last one is an outlier
    for j, words in enumerate([320, 380, 410, 520]):
        rows[j][1] = long_post(rng, rows[j][2] == 0, words)
    write("ag.csv", ["", "Post", "Suicidal_Label", "Sentiment_Label"], rows)

    rows = []
    flags = [1] * 35 + [0] * 45
    rng.shuffle(flags)
    for f in flags:
        rows.append([post(rng, f == 1), f])
    write("ims.csv", ["text", "label"], rows)

    rows = []
    flags = [1] * 35 + [0] * 45
    rng.shuffle(flags)
    for f in flags:
        rows.append([post(rng, f == 1), f])
    write("lax.csv", ["tweet", "intention"], rows)

    write("msh.csv", ["text"], [[post(rng, True)] for _ in range(40)])

    rows = []
    kinds = [0, 1] * 32 + [0] + [2, 4] * 37 + [2] + [3] * 10 + ["empty"] * 5 + ["fr"] * 5
    rng.shuffle(kinds)
    for i, k in enumerate(kinds):
        tid = 1608974000000000000 + i
        if k == "empty":
            rows.append([tid, 4, "training", "None", "", "", "", "", ""])
        elif k == "fr":
            rows.append([tid, 4, "test", f"user{i}", 100.0, "Mon serveur discord est cool", "fr", "[]", "tweet"])
        else:
            text = post(rng, k in (0, 1)) if k != 3 else "New report on suicide prevention awareness month"
            rows.append([tid, k, "training", f"user{i}", float(rng.randint(1, 5000)), text, "en", "[]", "tweet"])
    write("ntl.csv", ["id", "label", "dataset", "screen_name", "followers_count", "full_text", "lang", "hashtags", "type"], rows)

    (OUT / "fixture.yaml").write_text(
        "# bundled synthetic fixture: 500 harmonized records, 250 per class\n"
        "data_dir: .\n"
        "sources:\n"
        + "".join(f"  {s}: {{path: {s.lower()}.csv}}\n" for s in ("TDA", "AG", "IMS", "LAX", "MSH", "NTL"))
        + "baseline: {min_document_frequency: 2}\n",
        encoding="utf-8",
    )


if __name__ == "__main__":
    main()
