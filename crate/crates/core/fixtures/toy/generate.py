"""Regenerates the toy fixture: 5 stems x 4 suffixes, embeddings clustered by stem.

Training words (40): every stem, 15 stem+suffix words, 20 two-suffix words.
Held-out words (5): one stem+suffix word per stem, absent from the training
word list and from the embeddings.
"""
import numpy as np

STEMS = ["balik", "kalem", "tavuk", "sehir", "deniz"]
SUFFIXES = ["ler", "de", "im", "ci"]
DOUBLES = [("ler", "de"), ("ler", "im"), ("ler", "ci"), ("im", "de")]
DIM = 16

rng = np.random.default_rng(20160817)
centers = rng.normal(size=(len(STEMS), DIM))
suffix_dirs = {s: rng.normal(size=DIM) for s in SUFFIXES}

train, held_out, gold = [], [], {}
for i, stem in enumerate(STEMS):
    train.append((stem, [stem]))
    for j, suf in enumerate(SUFFIXES):
        entry = (stem + suf, [stem, suf])
        (held_out if j == i % len(SUFFIXES) else train).append(entry)
    for a, b in DOUBLES:
        train.append((stem + a + b, [stem, a, b]))

assert len(train) == 40 and len(held_out) == 5

def vector(i, morphs):
    v = 3.0 * centers[i] + 0.3 * rng.normal(size=DIM)
    for m in morphs[1:]:
        v += 0.4 * suffix_dirs[m]
    return v

with open("embeddings.txt", "w") as f:
    f.write(f"{len(train)} {DIM}\n")
    for word, morphs in train:
        i = STEMS.index(morphs[0])
        f.write(word + " " + " ".join(f"{x:.6f}" for x in vector(i, morphs)) + "\n")

with open("wordlist.txt", "w") as f:
    for word, morphs in train:
        freq = {1: 40, 2: 12, 3: 4}[len(morphs)] + int(rng.integers(0, 4))
        f.write(f"{freq}\t{word}\n")

with open("heldout.txt", "w") as f:
    for word, _ in held_out:
        f.write(word + "\n")

with open("gold.txt", "w") as f:
    for word, morphs in sorted(train + held_out):
        f.write(f"{word}\t{' '.join(morphs)}\n")
