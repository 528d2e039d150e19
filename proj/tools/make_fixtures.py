#!/usr/bin/env python3
"""Regenerates the frozen fixture files under data/fixtures/.

The generated files are checked in; this script only documents how they
were produced and re-checks the margins the tests rely on. Run from the
repository root:  python3 tools/make_fixtures.py
"""
import itertools
import random
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "data" / "fixtures"
rng = np.random.default_rng(20201016)

# Axes: person, place, commerce, food, plant, art, tech, govt
HAND = {
    "people": [0.9, 0.4, 0.3, 0.1, 0.0, 0.2, 0.0, 0.3],
    "in": [0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1],
    "city": [0.3, 0.9, 0.3, 0.0, 0.0, 0.2, 0.0, 0.4],
    "usually": [0.1, 0.0, 0.1, 0.1, 0.0, 0.0, 0.1, 0.0],
    "buy": [0.2, 0.0, 0.9, 0.3, 0.0, 0.0, 0.1, 0.0],
    "apple": [0.0, 0.0, 0.3, 0.8, 0.6, 0.2, 0.6, 0.0],
    "the": [0.12, 0.1, 0.1, 0.1, 0.09, 0.1, 0.1, 0.1],
    "local": [0.3, 0.7, 0.3, 0.1, 0.0, 0.0, 0.0, 0.2],
    "market": [0.2, 0.5, 0.9, 0.3, 0.0, 0.0, 0.0, 0.1],
    # people
    "citizen": [0.8, 0.5, 0.3, 0.0, 0.0, 0.0, 0.0, 0.5],
    "human": [1.0, 0.0, 0.0, 0.0, 0.3, 0.1, 0.0, 0.0],
    "population": [0.6, 0.7, 0.0, 0.0, 0.0, 0.0, 0.0, 0.6],
    "folk": [0.3, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
    # city
    "settlement": [0.3, 0.9, 0.4, 0.1, 0.0, 0.0, 0.0, 0.2],
    "municipality": [0.1, 0.7, 0.0, 0.0, 0.0, 0.0, 0.0, 0.9],
    "capital": [0.1, 0.6, 0.3, 0.0, 0.0, 0.0, 0.0, 0.8],
    "football_club": [0.5, 0.1, 0.2, 0.0, 0.0, 0.5, 0.0, 0.0],
    # apple
    "tree": [0.0, 0.0, 0.0, 0.3, 1.0, 0.0, 0.0, 0.0],
    "culture": [0.2, 0.0, 0.2, 0.3, 0.3, 0.8, 0.3, 0.0],
    "fruit": [0.0, 0.0, 0.4, 1.0, 0.5, 0.0, 0.0, 0.0],
    "device": [0.0, 0.0, 0.4, 0.0, 0.0, 0.0, 1.0, 0.0],
    "apple_inc": [0.1, 0.0, 0.6, 0.0, 0.0, 0.0, 0.8, 0.2],
    # market
    "supermarket": [0.2, 0.4, 1.0, 0.5, 0.0, 0.0, 0.0, 0.0],
    "economy": [0.0, 0.0, 0.8, 0.0, 0.0, 0.0, 0.2, 0.6],
    "bazaar": [0.2, 0.5, 0.6, 0.1, 0.0, 0.6, 0.0, 0.0],
    "stock_exchange": [0.0, 0.1, 0.7, 0.0, 0.0, 0.0, 0.3, 0.5],
    # "Run quickly!"
    "run": [0.3, 0.1, 0.0, 0.0, 0.0, 0.1, 0.1, 0.0],
    "quickly": [0.1, 0.0, 0.1, 0.0, 0.0, 0.0, 0.1, 0.0],
}

KG = [
    ("people", "type", "citizen"),
    ("people", "related", "human"),
    ("population", "of", "people"),
    ("people", "genre", "folk"),
    ("city", "type", "settlement"),
    ("city", "type", "municipality"),
    ("capital", "broader", "city"),
    ("city", "nickname", "football_club"),
    ("apple", "growsOn", "tree"),
    ("apple", "related", "culture"),
    ("apple", "type", "fruit"),
    ("apple", "product", "device"),
    ("apple", "sameAs", "apple inc"),
    ("fruit", "broader", "food"),
    ("market", "type", "supermarket"),
    ("market", "related", "economy"),
    ("market", "related", "bazaar"),
    ("market", "related", "stock exchange"),
]

# Ambiguous nouns for the 100-sentence corpus: noun -> {sense: context words}
SENSE_AXES = 8
AMBIG = {
    "bank": {"river": ["water", "shore", "boat"], "finance": ["money", "loan", "cash"]},
    "bass": {"fish": ["water", "boat", "lake"], "instrument": ["music", "song", "band"]},
    "mouse": {"rodent": ["cheese", "cat", "tail"], "peripheral": ["computer", "screen", "keyboard"]},
    "plant": {"factory": ["worker", "machine", "steel"], "flower": ["garden", "soil", "leaf"]},
    "star": {"sun": ["sky", "night", "planet"], "celebrity": ["film", "fan", "stage"]},
}
FILLERS = {"a": "DT", "near": "IN", "with": "IN", "saw": "VBD", "likes": "VBZ", "big": "JJ",
           "old": "JJ", "new": "JJ", "and": "CC", "is": "VBZ", "very": "RB"}


def unit(n):
    v = rng.normal(size=n)
    return v / np.linalg.norm(v)


def build_ambiguous(vectors, kg, lexicon):
    for noun, senses in AMBIG.items():
        protos = {}
        for sense, ctx in senses.items():
            proto = unit(SENSE_AXES)
            protos[sense] = proto
            vectors[sense] = proto + 0.1 * rng.normal(size=SENSE_AXES)
            for w in ctx:
                base = vectors.get(w)
                v = proto + 0.3 * rng.normal(size=SENSE_AXES)
                vectors[w] = v if base is None else (base + v) / 2
                lexicon.setdefault(w, "NN")
            kg.append((noun, "sense", sense))
        vectors[noun] = sum(protos.values()) / len(protos) + 0.05 * rng.normal(size=SENSE_AXES)
    for w in FILLERS:
        vectors[w] = 0.1 * rng.normal(size=SENSE_AXES)


def cos(a, b):
    return float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))


def main():
    vectors = {w: np.array(v, dtype=float) for w, v in HAND.items()}
    kg = list(KG)
    lexicon = {
        "people": "NNS", "in": "IN", "cities": "NNS", "city": "NN", "usually": "RB", "buy": "VBP",
        "apples": "NNS", "apple": "NN", "the": "DT", "local": "JJ", "markets": "NNS", "market": "NN",
        "run": "VB", "quickly": "RB", "!": ".", ".": ".", ",": ",", "?": ".",
        "zebra": "NN", "unicorn": "NN", "qwerty": "NN",
    }
    build_ambiguous(vectors, kg, lexicon)
    lexicon.update(FILLERS)
    for noun in AMBIG:
        lexicon[noun] = "NN"
        lexicon[noun + ("es" if noun.endswith("s") else "s")] = "NNS"
    lexicon["mice"] = "NNS"
    # unicorn lives in the store but not in the KG; zebra has only OOV neighbors.
    vectors["unicorn"] = np.array([0.1, 0.0, 0.0, 0.1, 0.2, 0.6, 0.0, 0.0])
    vectors["zebra"] = np.array([0.2, 0.0, 0.0, 0.1, 0.6, 0.0, 0.0, 0.0])
    kg.append(("zebra", "habitat", "savanna"))
    kg.append(("zebra", "order", "odd-toed ungulate"))

    # Golden-sentence checks.
    sentence = ["people", "in", "city", "usually", "buy", "apple", "in", "the", "local", "market"]
    vavg = sum(vectors[w] for w in sentence) / len(sentence)
    adj = {}
    for s, _, o in kg:
        s, o = s.replace(" ", "_"), o.replace(" ", "_")
        adj.setdefault(s, set()).add(o)
        adj.setdefault(o, set()).add(s)
    want = {"people": "citizen", "city": "settlement", "apple": "fruit", "market": "supermarket"}
    for ent, chosen in want.items():
        cands = [c for c in adj[ent] if c in vectors and c != ent]
        ranked = sorted(cands, key=lambda c: (-cos(vectors[c], vectors[ent]), c))[:3]
        scores = {c: cos(vectors[c], vavg) for c in ranked}
        best = max(ranked, key=lambda c: (scores[c], [-ord(ch) for ch in c]))
        margin = scores[best] - max(v for c, v in scores.items() if c != best)
        print(ent, ranked, best, f"margin={margin:.4f}")
        assert best == chosen, (ent, best)
        assert margin > 1e-3
    apple_top = sorted([c for c in adj["apple"] if c in vectors],
                       key=lambda c: -cos(vectors[c], vectors["apple"]))[:3]
    assert set(apple_top) == {"tree", "culture", "fruit"}, apple_top

    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / "embeddings.txt", "w") as f:
        for w in sorted(vectors):
            f.write(w + " " + " ".join(f"{x:.6f}" for x in vectors[w]) + "\n")
    with open(OUT / "kg.tsv", "w") as f:
        f.write("# subject\tpredicate\tobject\n")
        for t in kg:
            f.write("\t".join(t) + "\n")
    with open(OUT / "lexicon.tsv", "w") as f:
        for w in sorted(lexicon):
            f.write(f"{w}\t{lexicon[w]}\n")

    # 100 enrichment sentences over the ambiguous nouns.
    prng = random.Random(7)
    sentences = []
    adjs = ["big", "old", "new"]
    for i in range(100):
        noun = prng.choice(sorted(AMBIG))
        sense = prng.choice(sorted(AMBIG[noun]))
        ctx = AMBIG[noun][sense]
        plural = prng.random() < 0.4
        surface = ({"mouse": "mice"}.get(noun) or noun + ("es" if noun.endswith("s") else "s")) if plural else noun
        w1, w2 = prng.sample(ctx, 2)
        pattern = i % 4
        if pattern == 0:
            s = f"The {prng.choice(adjs)} {surface} near the {w1} {'are' if plural else 'is'} very {prng.choice(adjs)}."
        elif pattern == 1:
            s = f"A {w1} likes the {surface} with a {w2}."
        elif pattern == 2:
            s = f"{w1.capitalize()} and {w2} saw the {surface}, {prng.choice(['people', 'the city'])} too."
        else:
            s = f"The {surface} is near the {w1} and the {w2}!"
        sentences.append(s)
    lexicon.setdefault("are", "VBP")
    lexicon.setdefault("too", "RB")
    with open(OUT / "lexicon.tsv", "w") as f:
        for w in sorted(lexicon):
            f.write(f"{w}\t{lexicon[w]}\n")
    (OUT / "sentences_100.txt").write_text("\n".join(sentences) + "\n")

    # 50-sentence LM toy corpus with strong regularities.
    subjects = ["the cat", "a dog", "the bird", "a fish"]
    verbs = ["eats", "sees", "likes", "chases"]
    objects = ["the food", "a ball", "the mouse", "a stick"]
    lm = []
    for i in range(50):
        s, v, o = subjects[i % 4], verbs[(i // 4) % 4], objects[(i * 3) % 4]
        lm.append(f"{s} {v} {o} today")
    (OUT / "toy_corpus.txt").write_text("\n".join(lm) + "\n")

    write_eval_fixtures()


def write_eval_fixtures():
    # Exact-offset analogy store: d = b - a + c, other words far away.
    base = {
        "man": [1, 0, 0, 0, 0, 0], "woman": [1, 1, 0, 0, 0, 0],
        "king": [0, 0, 1, 0, 0, 0], "queen": [0, 1, 1, 0, 0, 0],
        "slow": [0, 0, 0, 1, 0, 0], "slowly": [0, 0, 0, 1, 0, 1],
        "quick": [0, 0, 0, 0, 1, 0], "quickly": [0, 0, 0, 0, 1, 1],
        "stone": [-1, -1, -1, -1, -1, -1],
    }
    with open(OUT / "analogy_exact_embeddings.txt", "w") as f:
        for w, v in base.items():
            f.write(w + " " + " ".join(str(x) for x in v) + "\n")
    (OUT / "analogy_exact.txt").write_text(
        ": family\nman woman king queen\n: gram1-adjective-to-adverb\nslow slowly quick quickly\n")

    # Mixed store: 40 random words, 12 questions, some right, some wrong, some OOV.
    words = [f"w{i:02d}" for i in range(40)]
    vecs = {w: rng.normal(size=5) for w in words}
    with open(OUT / "analogy_mixed_embeddings.txt", "w") as f:
        for w in words:
            f.write(w + " " + " ".join(f"{x:.6f}" for x in vecs[w]) + "\n")
    prng = random.Random(11)
    lines = [": capital-world"]
    for i in range(12):
        if i == 6:
            lines.append(": gram3-comparative")
        q = prng.sample(words, 4)
        if i in (2, 7):
            q[prng.randrange(4)] = "oov" + str(i)
        if i in (0, 1, 8, 9, 10):
            # plant the 3CosAdd answer so some questions are correct
            a, b, c = (vecs[x] for x in q[:3])
            target = b - a + c
            best = max((w for w in words if w not in q[:3]),
                       key=lambda w: cos(vecs[w], target))
            q[3] = best
        lines.append(" ".join(q))
    (OUT / "analogy_mixed.txt").write_text("\n".join(lines) + "\n")

    # Similarity over the main enrichment store (distinct cosines).
    store = {w: np.array(v, dtype=float) for w, v in HAND.items()}
    pairs = [("citizen", "people"), ("fruit", "apple"), ("tree", "apple"), ("device", "apple"),
             ("city", "settlement"), ("market", "supermarket"), ("folk", "human"),
             ("economy", "municipality"), ("buy", "market"), ("tree", "device")]
    scored = sorted(((a, b, cos(store[a], store[b])) for a, b in pairs), key=lambda t: t[2])
    with open(OUT / "similarity.tsv", "w") as f:
        for i, (a, b, _) in enumerate(scored):
            f.write(f"{a}\t{b}\t{1.0 + 0.9 * i:.2f}\n")
    with open(OUT / "similarity_reversed.tsv", "w") as f:
        for i, (a, b, _) in enumerate(scored):
            f.write(f"{a}\t{b}\t{10.0 - i:.1f}\n")
    # Mixed: gold disagrees with cosine on a few pairs, plus one OOV pair.
    gold = [2.0, 1.0, 3.0, 6.0, 4.0, 5.0, 7.0, 10.0, 9.0, 8.0]
    with open(OUT / "similarity_mixed.tsv", "w") as f:
        for (a, b, _), g in zip(scored, gold):
            f.write(f"{a}\t{b}\t{g:.1f}\n")
        f.write("people\tqwerty\t4.5\n")
    d2 = sum((i + 1 - g) ** 2 for i, g in enumerate(gold))
    print("similarity cosine order:", [(a, b, round(c, 4)) for a, b, c in scored])
    print("mixed rho =", 1 - 6 * d2 / (10 * 99))

if __name__ == "__main__":
    main()
