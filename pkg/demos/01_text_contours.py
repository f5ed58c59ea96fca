"""Walk a single document through feature extraction.

Builds the miniature resource set, extracts the per-sentence feature
matrix for one short text, and prints a few selected feature contours
before and after z-standardization.
"""

import tempfile

import numpy as np

from textcontours import (
    Document,
    build_registry,
    build_contours,
    fit_standardizer,
    load_store,
    segment,
)
from textcontours.synthetic import write_store_files

# joined into one line: the splitter treats newlines as hard boundaries
TEXT = " ".join("""I was very happy when the morning started. The street
outside my window was quiet and calm. Then a gloomy letter arrived and I
became worried. I never imagined a simple paper could make me so anxious!
Because my friend visited in the evening, the sadness faded. We walked
along the river and watched the city lights. I felt hopeful and proud.
Tomorrow I will write a cheerful letter of my own.""".split())

with tempfile.TemporaryDirectory() as tmp:
    store = load_store(write_store_files(tmp))
    registry = build_registry(store)

    doc = Document(id="demo", text=TEXT)
    sentences = segment(doc)
    print(f"document split into {len(sentences)} sentences, "
          f"feature dimension {registry.dimension}")
    for group, counts in registry.group_report().items():
        print(f"  {group:12s} {counts['count']:4d} features "
              f"(full-resource target {counts['target']})")

    matrix = build_contours(doc, sentences, store, registry)
    std = fit_standardizer([matrix])
    z = std.transform(matrix)

    show = ["sentence_length_words", "flesch_reading_ease", "mood_valence",
            "cttr_cumulative"]
    idx = {name: registry.names.index(name) for name in show}
    print("\nraw contours (rows = sentences):")
    for name in show:
        vals = " ".join(f"{v:7.2f}" for v in matrix.values[:, idx[name]])
        print(f"  {name:22s} {vals}")
    print("\nz-standardized (0 = document mean):")
    for name in show:
        vals = " ".join(f"{v:7.2f}" for v in z.values[:, idx[name]])
        print(f"  {name:22s} {vals}")

    v = matrix.values[:, idx["mood_valence"]]
    peak = int(np.argmax(np.abs(v - v.mean())))
    print(f"\nmost affect-marked sentence (#{peak}): "
          f"{' '.join(sentences[peak].surfaces())}")
