#!/usr/bin/env python3
"""Generate tests/data/counts_corpus.jsonl from the published corpus counts.

Each aspect gets Occ annotations: Pos with scores cycling 1..9, Neg with
-1..-9 and the rest neutral (0). Annotations are laid out aspect by aspect
and dealt round-robin over the labeled sentences, so no sentence repeats an
aspect. Unlabeled sentences are interleaved; 117 reviews get 7 sentences and
the other 277 get 6.
"""
import json
import sys

ASPECTS = [
    ("Average Demand", 60, 23, 25),
    ("Up-To-Date", 58, 35, 20),
    ("Practical Relevance", 50, 36, 8),
    ("Quality of Contents", 229, 143, 66),
    ("Exams", 77, 35, 19),
    ("Production Quality", 7, 5, 2),
    ("Accessibility", 22, 20, 2),
    ("Extent of Materials", 28, 21, 3),
    ("Exercise Materials", 44, 29, 13),
    ("Supervision", 487, 409, 61),
    ("Revision Time", 89, 78, 10),
    ("Organization", 173, 107, 54),
    ("Teaching Competence", 124, 101, 13),
    ("Didactics of Materials", 308, 220, 72),
    ("Justified Grading", 20, 15, 3),
    ("Revision Quality", 75, 48, 22),
    ("Usefulness", 119, 84, 28),
    ("Activity", 35, 29, 6),
    ("User-Friendliness", 20, 8, 11),
    ("Features", 22, 18, 2),
    ("Basic Tuition", 78, 48, 17),
    ("Additional Charges", 10, 7, 3),
    ("Scholarships", 2, 0, 0),
    ("Seminar Contents", 84, 59, 14),
    ("Management", 18, 12, 5),
    ("Locations", 9, 7, 2),
    ("Communications", 16, 15, 1),
    ("Flexibility", 103, 96, 2),
    ("Recommendation", 77, 71, 4),
    ("Personal Benefit", 74, 61, 6),
    ("Overall Satisfaction", 236, 215, 17),
    ("Learning Effort", 82, 29, 45),
]
UNLABELED = 345
REVIEWS = 394
LONG_REVIEWS = 117  # 7 sentences; the rest have 6


def main(out_path):
    annotations = []
    for name, occ, pos, neg in ASPECTS:
        assert pos + neg <= occ, name
        for i in range(pos):
            annotations.append((name, 1 + i % 9))
        for i in range(neg):
            annotations.append((name, -(1 + i % 9)))
        for _ in range(occ - pos - neg):
            annotations.append((name, 0))

    labeled = 2136
    sentences = [[] for _ in range(labeled)]
    for j, ann in enumerate(annotations):
        sentences[j % labeled].append(ann)

    total = labeled + UNLABELED
    assert LONG_REVIEWS * 7 + (REVIEWS - LONG_REVIEWS) * 6 == total

    slots = []
    next_labeled = 0
    unlabeled_left = UNLABELED
    for s in range(total):
        if unlabeled_left and (s % 7 == 3 or total - s == unlabeled_left):
            slots.append(None)
            unlabeled_left -= 1
        else:
            slots.append(sentences[next_labeled])
            next_labeled += 1
    assert next_labeled == labeled and unlabeled_left == 0

    lines = []
    cursor = 0
    for r in range(REVIEWS):
        size = 7 if r < LONG_REVIEWS else 6
        record = {"id": "r%03d" % (r + 1), "sentences": []}
        for k in range(size):
            anns = slots[cursor]
            text = "Review %d sentence %d." % (r + 1, k + 1)
            sent = {"text": text, "annotations": []}
            if anns:
                sent["annotations"] = [{"aspect": a, "score": sc} for a, sc in anns]
            record["sentences"].append(sent)
            cursor += 1
        lines.append(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
    with open(out_path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/counts_corpus.jsonl")
